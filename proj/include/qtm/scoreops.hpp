#pragma once

// Bayes score operators W_j = E_f[ S(j|f) |F><F| ] on the symmetric subspace.
// Closed forms for the binary great-circle prior (both bases) and for the
// uniform Bloch-sphere prior with M equatorial templates, plus a direct
// quadrature of the defining integral used as an independent oracle.

#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"
#include "qtm/qstates.hpp"

namespace qtm {

/// Prior over the input feature state.
enum class InputPrior {
  BinaryCircle,  ///< uniform on the great circle through the binary templates
  FullSphere,    ///< uniform on the whole Bloch sphere
};

struct ScoreOperator {
  ComplexMatrix matrix;
  int template_index;
  BasisTag basis;
  int n_copies;
  InputPrior setting;

  std::size_t dim() const noexcept { return matrix.dim(); }
};

/// Invariant violations of a score operator (Hermitian, PSD, trace 1/2); empty
/// when all hold within `tol`.
inline std::vector<std::string> score_operator_violations(const ScoreOperator& w,
                                                          double tol = 1e-12) {
  std::vector<std::string> out;
  if (w.matrix.hermiticity_residual() > tol) out.emplace_back("not Hermitian");
  if (std::abs(w.matrix.trace() - complex{0.5, 0.0}) > tol) out.emplace_back("trace != 1/2");
  if (out.empty() && min_eigenvalue_of_hermitian_part(w.matrix) < -tol) {
    out.emplace_back("not PSD");
  }
  return out;
}

namespace detail {

__extension__ using u128 = unsigned __int128;

inline u128 exact_double_factorial(int n) {
  u128 r = 1;
  for (int k = n; k > 1; k -= 2) r *= static_cast<u128>(k);
  return r;
}

// log(n!!) with (-1)!! = 0!! = 1.
inline double log_double_factorial(int n) {
  if (n <= 0) return 0.0;
  if (n % 2 == 0) {
    const int m = n / 2;
    return m * std::numbers::ln2 + std::lgamma(m + 1.0);
  }
  const int m = (n + 1) / 2;  // n = 2m - 1
  return std::lgamma(2.0 * m + 1.0) - m * std::numbers::ln2 - std::lgamma(m + 1.0);
}

inline constexpr int kExactFactorialMaxCopies = 20;

// a!! b!! / c!!, exact for the argument range reached when N <= 20.
inline double double_factorial_ratio(int a, int b, int c, int n_copies) {
  if (n_copies <= kExactFactorialMaxCopies) {
    const auto num = static_cast<long double>(exact_double_factorial(a)) *
                     static_cast<long double>(exact_double_factorial(b));
    return static_cast<double>(num / static_cast<long double>(exact_double_factorial(c)));
  }
  return std::exp(log_double_factorial(a) + log_double_factorial(b) - log_double_factorial(c));
}

inline double sqrt_binomial_product(int n, int k, int l) {
  const long double p = static_cast<long double>(binomial(n, k)) *
                        static_cast<long double>(binomial(n, l));
  return static_cast<double>(std::sqrt(p));
}

inline void require_binary_args(int n, double theta) {
  require_copies(n);
  require_template_angle(theta);
}

}  // namespace detail

/// Binary great-circle score operator in the up/down basis,
/// theta_0 = theta, theta_1 = pi - theta.
inline ScoreOperator binary_score_operator(int n, double theta, int j) {
  detail::require_binary_args(n, theta);
  if (j != 0 && j != 1) throw IndexError("binary_score_operator: j must be 0 or 1");
  // cos(pi - theta) = -cos(theta), sin(pi - theta) = sin(theta)
  const double cos_t = j == 0 ? std::cos(theta) : -std::cos(theta);
  const double sin_t = std::sin(theta);
  ComplexMatrix w(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    for (int l = 0; l <= n; ++l) {
      const double b = detail::sqrt_binomial_product(n, k, l);
      const int s = k + l;
      double v;
      if (s % 2 == 0) {
        v = b * detail::double_factorial_ratio(s - 1, 2 * n - s - 1, 2 * n + 2, n) *
            ((n - s) * cos_t + (n + 1));
      } else {
        v = b * detail::double_factorial_ratio(s, 2 * n - s, 2 * n + 2, n) * sin_t;
      }
      w(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) = v;
    }
  }
  return {std::move(w), j, BasisTag::UpDown, n, InputPrior::BinaryCircle};
}

/// W_0 - W_1 for the binary problem (up/down basis). Non-zero only on k+l even.
inline ComplexMatrix binary_diff_operator(int n, double theta) {
  detail::require_binary_args(n, theta);
  const double c = std::cos(theta);
  ComplexMatrix d(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    for (int l = k % 2; l <= n; l += 2) {
      const int s = k + l;
      d(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) =
          detail::sqrt_binomial_product(n, k, l) *
          detail::double_factorial_ratio(s - 1, 2 * n - s - 1, 2 * n, n) *
          (static_cast<double>(n - s) / (n + 1)) * c;
    }
  }
  return d;
}

/// Binary score operator in the v-basis, where the input circle is the
/// equator. W_1 is the entrywise complex conjugate of W_0.
inline ScoreOperator binary_score_operator_vbasis(int n, double theta, int j) {
  detail::require_binary_args(n, theta);
  if (j != 0 && j != 1) throw IndexError("binary_score_operator_vbasis: j must be 0 or 1");
  const double scale = std::ldexp(1.0, -(n + 2));
  const complex phase = std::polar(1.0, (j == 0 ? 1.0 : -1.0) * (std::numbers::pi / 2 - theta));
  ComplexMatrix w(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    w(kk, kk) = 2.0 * static_cast<double>(binomial(n, k)) * scale;
    if (k < n) {
      const double off = static_cast<double>(binomial(n, k)) *
                         std::sqrt(static_cast<double>(n - k) / (k + 1)) * scale;
      w(kk + 1, kk) = off * phase;
      w(kk, kk + 1) = off * std::conj(phase);
    }
  }
  return {std::move(w), j, BasisTag::VBasis, n, InputPrior::BinaryCircle};
}

/// Score operator for template m of M equatorial templates under the
/// uniform-sphere prior (up/down basis). Tridiagonal; covariant under the
/// shift V: W_m = V^m W_0 V^{-m}.
inline ScoreOperator multi_score_operator(int n, int M, int m) {
  require_copies(n);
  if (M < 2) throw DomainError("multi_score_operator: M must be >= 2");
  if (m < 0 || m >= M) {
    throw IndexError("multi_score_operator: m=" + std::to_string(m) + " outside [0, M)");
  }
  const double pre = 1.0 / (2.0 * (n + 1));
  const complex phase = cis_pi(2LL * m, M);
  ComplexMatrix w(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    w(kk, kk) = pre;
    if (k < n) {
      const double off = pre * std::sqrt(static_cast<double>((n - k) * (k + 1))) / (n + 2);
      w(kk + 1, kk) = off * phase;
      w(kk, kk + 1) = off * std::conj(phase);
    }
  }
  return {std::move(w), m, BasisTag::UpDown, n, InputPrior::FullSphere};
}

namespace detail {

struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(std::size_t count) {
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>
      table(gsl_integration_glfixed_table_alloc(count), &gsl_integration_glfixed_table_free);
  if (!table) throw DomainError("gauss_legendre: table allocation failed");
  GaussLegendre gl{std::vector<double>(count), std::vector<double>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    gsl_integration_glfixed_point(-1.0, 1.0, i, &gl.nodes[i], &gl.weights[i], table.get());
  }
  return gl;
}

inline void accumulate_weighted_projector(ComplexMatrix& acc, const BosonicState& f, double w) {
  for (std::size_t k = 0; k < f.dim(); ++k)
    for (std::size_t l = 0; l < f.dim(); ++l) acc(k, l) += w * f.amps[k] * std::conj(f.amps[l]);
}

}  // namespace detail

/// Direct numerical evaluation of the defining integral
///   W_j = E_f[ |<f|g_j>|^2 |f><f|^{(x)N} ].
///
/// BinaryCircle averages over 4(N+2) equally spaced points of the input
/// circle (cos(phi/2), sin(phi/2)) in the up/down basis, or
/// (e^{-i phi/2}, e^{i phi/2})/sqrt2 in the v-basis. FullSphere additionally
/// integrates cos(polar) with (N+4)-point Gauss-Legendre. Both rules are
/// exact for the trigonometric/polynomial integrands involved.
inline ScoreOperator score_operator_quadrature(int n, std::span<const QubitState> templates,
                                               InputPrior setting, int j) {
  require_copies(n);
  if (j < 0 || static_cast<std::size_t>(j) >= templates.size()) {
    throw IndexError("score_operator_quadrature: template index out of range");
  }
  const QubitState& g = templates[static_cast<std::size_t>(j)];
  const BasisTag basis = g.basis();
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  const int azimuth_nodes = 4 * (n + 2);
  ComplexMatrix acc(dim);

  if (setting == InputPrior::BinaryCircle) {
    for (int i = 0; i < azimuth_nodes; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / azimuth_nodes;
      const QubitState f = basis == BasisTag::UpDown ? feature_state(phi) : equator_state(phi);
      detail::accumulate_weighted_projector(acc, n_copy_bosonic(f, n),
                                            overlap_sq(f, g) / azimuth_nodes);
    }
  } else {
    if (basis != BasisTag::UpDown) {
      throw BasisMismatch("score_operator_quadrature: FullSphere prior is defined in up-down basis");
    }
    const auto gl = detail::gauss_legendre(static_cast<std::size_t>(n) + 4);
    for (std::size_t p = 0; p < gl.nodes.size(); ++p) {
      const double polar = std::acos(gl.nodes[p]);
      // (1/4pi) dphi sin(t) dt = (1/2) dx * (dphi / 2pi)
      const double wp = 0.5 * gl.weights[p] / azimuth_nodes;
      for (int i = 0; i < azimuth_nodes; ++i) {
        const double phi = 2.0 * std::numbers::pi * i / azimuth_nodes;
        const QubitState f = sphere_state(polar, phi);
        detail::accumulate_weighted_projector(acc, n_copy_bosonic(f, n), wp * overlap_sq(f, g));
      }
    }
  }
  return {std::move(acc), j, basis, n, setting};
}

}  // namespace qtm
