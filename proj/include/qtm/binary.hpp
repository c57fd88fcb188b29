#pragma once

// Binary template matching on the great circle: the optimal collective POM,
// separable measurement + majority voting, and optimal state estimation
// followed by classical matching.

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"
#include "qtm/pom.hpp"
#include "qtm/qstates.hpp"
#include "qtm/scoreops.hpp"

namespace qtm {

struct StrategyScore {
  std::string strategy;
  int n;
  double theta;
  double score;
  std::map<std::string, double> metadata;
};

inline std::vector<ScoreOperator> binary_score_operators(int n, double theta,
                                                         BasisTag basis = BasisTag::UpDown) {
  if (basis == BasisTag::UpDown) {
    return {binary_score_operator(n, theta, 0), binary_score_operator(n, theta, 1)};
  }
  return {binary_score_operator_vbasis(n, theta, 0), binary_score_operator_vbasis(n, theta, 1)};
}

inline Pom binary_pom(ComplexMatrix pi0, ComplexMatrix pi1, BasisTag basis = BasisTag::UpDown) {
  return Pom{{std::move(pi0), std::move(pi1)}, {"g0", "g1"}, basis};
}

/// Optimal binary strategy together with the spectrum it was built from.
struct BinaryOptimum {
  Pom pom;
  StrategyScore score;
  /// Spectrum of (W_0 - W_1)/cos(theta); theta-independent.
  EigenDecomposition spectrum;
  /// Unitary P with P (W_0 - W_1) P^dag diagonal (rows are eigenvectors).
  ComplexMatrix diagonalizer;
};

/// Projects onto the non-negative eigenspace of W_0 - W_1. A zero eigenvalue
/// (even N) goes to template 0. Since W_0 - W_1 is cos(theta) times a fixed
/// matrix, the POM is built from that fixed matrix and does not depend on
/// theta; at theta = pi/2 every strategy scores 1/2 and metadata flags it.
inline BinaryOptimum optimal_binary_pom(int n, double theta) {
  require_copies(n);
  require_template_angle(theta);
  auto spectrum = eig_hermitian(binary_diff_operator(n, 0.0));
  const std::size_t dim = spectrum.source_dim;

  const double zero_tol = 1e-12 * std::max(std::abs(spectrum.eigenvalues.front()),
                                           std::abs(spectrum.eigenvalues.back()));
  ComplexMatrix pi0(dim), pi1(dim);
  double positive_sum = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const auto v = spectrum.column(j);
    const double lambda = spectrum.eigenvalues[j];
    if (lambda >= -zero_tol) {
      pi0 += ComplexMatrix::outer(v, v);
      positive_sum += std::max(lambda, 0.0);
    } else {
      pi1 += ComplexMatrix::outer(v, v);
    }
  }

  StrategyScore s{"optimal", n, theta, 0.5 + positive_sum * std::cos(theta), {}};
  if (std::abs(std::cos(theta)) < 1e-15) s.metadata["degenerate"] = 1.0;
  ComplexMatrix p = spectrum.eigenvectors.adjoint();
  return {binary_pom(std::move(pi0), std::move(pi1)), std::move(s), std::move(spectrum),
          std::move(p)};
}

/// Separable measurement of every copy in the up/down basis, then majority
/// vote: projectors onto occupation numbers k <= floor(N/2) and k > floor(N/2).
inline Pom majority_voting_pom(int n) {
  require_copies(n);
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  ComplexMatrix pi0(dim), pi1(dim);
  for (int k = 0; k <= n; ++k) {
    auto& target = k <= n / 2 ? pi0 : pi1;
    target(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) = 1.0;
  }
  return binary_pom(std::move(pi0), std::move(pi1));
}

/// Closed-form majority-voting score
///   1/2 + cos(theta) sum_{k<=N/2} C(N,k) (2k-1)!!(2N-2k-1)!!/(2N)!! (N-2k)/(N+1).
inline StrategyScore majority_voting_score(int n, double theta) {
  require_copies(n);
  require_template_angle(theta);
  double sum = 0.0;
  for (int k = 0; k <= n / 2; ++k) {
    sum += static_cast<double>(binomial(n, k)) *
           detail::double_factorial_ratio(2 * k - 1, 2 * n - 2 * k - 1, 2 * n, n) *
           static_cast<double>(n - 2 * k) / (n + 1);
  }
  return {"majority-voting", n, theta, 0.5 + sum * std::cos(theta), {}};
}

/// Square-root measurement for state estimation on M equator points, and its
/// condensation into a binary template decision.
struct EstimationPom {
  Pom fine;                 ///< M rank-one elements |mu_m><mu_m| (v-basis)
  Pom condensed;            ///< {Pi_0^EST, Pi_1^EST}
  std::vector<int> assignment;  ///< template chosen for estimate m
  std::vector<ComplexVector> mu;
};

inline void require_estimation_args(int n, int M) {
  require_copies(n);
  if (M <= n) {
    throw DomainError("estimation strategy needs M > N (got M=" + std::to_string(M) +
                      ", N=" + std::to_string(n) + ")");
  }
}

/// Estimate m goes to template 0 when |<g0|f_m>| >= |<g1|f_m>| (ties to 0).
/// The comparison uses the orthogonal templates: the sign of
/// |<g0|f>|^2 - |<g1|f>|^2 is the same for every theta < pi/2.
inline EstimationPom srm_estimation_pom(int n, int M, double phase) {
  require_estimation_args(n, M);
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  std::vector<BosonicState> estimates;
  estimates.reserve(static_cast<std::size_t>(M));
  ComplexMatrix gram(dim);
  for (int m = 0; m < M; ++m) {
    estimates.push_back(n_copy_bosonic(equatorial_state(m, M, phase), n));
    gram += estimates.back().projector();
  }
  const ComplexMatrix gram_inv_sqrt = inv_sqrt_psd(gram);

  const auto [g0, g1] = template_pair_vbasis(0.0);
  EstimationPom out;
  out.fine.basis = out.condensed.basis = BasisTag::VBasis;
  ComplexMatrix pi0(dim), pi1(dim);
  for (int m = 0; m < M; ++m) {
    auto mu = gram_inv_sqrt.apply(estimates[static_cast<std::size_t>(m)].amps);
    auto element = ComplexMatrix::outer(mu, mu);
    const QubitState f = equatorial_state(m, M, phase);
    const double d = std::sqrt(overlap_sq(g0, f)) - std::sqrt(overlap_sq(g1, f));
    const int cls = d >= -1e-12 ? 0 : 1;
    (cls == 0 ? pi0 : pi1) += element;
    out.assignment.push_back(cls);
    out.fine.elements.push_back(std::move(element));
    out.fine.labels.push_back("f" + std::to_string(m));
    out.mu.push_back(std::move(mu));
  }
  out.condensed.elements = {std::move(pi0), std::move(pi1)};
  out.condensed.labels = {"g0", "g1"};
  return out;
}

/// True where the closed-form estimation score is valid: M even and
/// phase in [0, 2 pi / M).
inline bool estimation_closed_form_applies(int M, double phase) {
  return M % 2 == 0 && phase >= 0.0 && phase < 2.0 * std::numbers::pi / M;
}

/// 1/2 + cos(theta) cos(phase - pi/M) / (2^N M sin(pi/M)) sum_k C(N,k) sqrt((N-k)/(k+1)).
inline double estimation_closed_form(int n, int M, double phase, double theta) {
  require_estimation_args(n, M);
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    sum += static_cast<double>(binomial(n, k)) * std::sqrt(static_cast<double>(n - k) / (k + 1));
  }
  const double pi = std::numbers::pi;
  return 0.5 + std::cos(theta) * std::cos(phase - pi / M) /
                   (std::ldexp(1.0, n) * M * std::sin(pi / M)) * sum;
}

/// Score of estimation + classical matching, always evaluated on the
/// constructed POM. Where the closed form applies it is reported in the
/// metadata as well.
inline StrategyScore estimation_matching_score(int n, int M, double phase, double theta) {
  require_estimation_args(n, M);
  require_template_angle(theta);
  const auto est = srm_estimation_pom(n, M, phase);
  const auto scores = binary_score_operators(n, theta, BasisTag::VBasis);
  StrategyScore s{"estimation", n, theta, average_score(est.condensed, scores), {}};
  s.metadata["M"] = M;
  s.metadata["phase"] = phase;
  const bool applies = estimation_closed_form_applies(M, phase);
  s.metadata["closed_form_applies"] = applies ? 1.0 : 0.0;
  if (applies) s.metadata["closed_form"] = estimation_closed_form(n, M, phase, theta);
  return s;
}

/// Reported estimation configuration: M = N + 1 estimates at phase pi/(N+1).
inline StrategyScore best_estimation_score(int n, double theta) {
  return estimation_matching_score(n, n + 1, std::numbers::pi / (n + 1), theta);
}

}  // namespace qtm
