#pragma once

// Matching against M templates spread evenly around the equator, with the
// input drawn uniformly from the Bloch sphere. The problem is covariant
// under the Z_M shift V, so POMs are handled through a single seed element.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"
#include "qtm/pom.hpp"
#include "qtm/qstates.hpp"
#include "qtm/scoreops.hpp"

namespace qtm {

/// V = sum_k e^{-i (N-2k) pi/M} |k><k|, the Z_M rotation on N copies.
struct ShiftOperator {
  ComplexMatrix matrix;
  int n;
  int M;

  /// V^p for any integer p (negative powers give the inverse).
  ComplexMatrix power(int p) const {
    ComplexMatrix out(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
      out(static_cast<std::size_t>(k), static_cast<std::size_t>(k)) =
          cis_pi(-static_cast<long long>(p) * (n - 2 * k), M);
    }
    return out;
  }

  /// V^p A V^{-p}
  ComplexMatrix rotate(const ComplexMatrix& a, int p) const {
    ComplexMatrix out = a;
    for (int k = 0; k <= n; ++k)
      for (int l = 0; l <= n; ++l) {
        // diagonal V: (V^p A V^-p)_{kl} = e^{-i p (N-2k) pi/M} e^{+i p (N-2l) pi/M} A_kl
        out(static_cast<std::size_t>(k), static_cast<std::size_t>(l)) *=
            cis_pi(2LL * p * (k - l), M);
      }
    return out;
  }
};

inline void require_multi_args(int n, int M) {
  require_copies(n);
  if (M < 2) throw DomainError("number of templates M=" + std::to_string(M) + " must be >= 2");
}

inline ShiftOperator shift_operator(int n, int M) {
  require_multi_args(n, M);
  ShiftOperator v{ComplexMatrix(static_cast<std::size_t>(n) + 1), n, M};
  v.matrix = v.power(1);
  return v;
}

inline std::vector<ScoreOperator> multi_score_operators(int n, int M) {
  std::vector<ScoreOperator> out;
  out.reserve(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) out.push_back(multi_score_operator(n, M, m));
  return out;
}

/// POM of the form Pi_m = V^m Pi_0 V^{-m}.
struct CovariantPom {
  ComplexMatrix seed;
  int n;
  int M;

  std::vector<ComplexMatrix> elements() const {
    const auto v = shift_operator(n, M);
    std::vector<ComplexMatrix> out;
    out.reserve(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) out.push_back(v.rotate(seed, m));
    return out;
  }

  Pom to_pom() const {
    Pom p{elements(), {}, BasisTag::UpDown};
    for (int m = 0; m < M; ++m) p.labels.push_back("g" + std::to_string(m));
    return p;
  }

  double completeness_residual() const { return to_pom().completeness_residual(); }
};

/// Square-root measurement built from the template copies |G_m> = |g_m>^{(x)N}.
/// Requires M > N; the seed is then |mu_0><mu_0| with mu_0 = (1/sqrt M) sum_k |k>.
inline CovariantPom srm_template_pom(int n, int M) {
  require_multi_args(n, M);
  if (M <= n) {
    throw DomainError("square-root template POM needs M > N (got M=" + std::to_string(M) +
                      ", N=" + std::to_string(n) + "); a rank-one orbit cannot resolve I");
  }
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  ComplexMatrix gram(dim);
  for (int m = 0; m < M; ++m) gram += n_copy_bosonic(uniform_template(m, M), n).projector();
  const auto g0 = n_copy_bosonic(uniform_template(0, M), n);
  const auto mu0 = inv_sqrt_psd(gram).apply(g0.amps);
  return {ComplexMatrix::outer(mu0, mu0), n, M};
}

/// 1/2 + sum_{k<N} sqrt((N-k)(k+1)) / ((N+1)(N+2))
inline double max_score_srm(int n) {
  require_copies(n);
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += std::sqrt(static_cast<double>((n - k) * (k + 1)));
  return 0.5 + s / ((n + 1.0) * (n + 2.0));
}

/// Reduced optimality conditions for a covariant POM:
/// Gamma = sum_m V^m W_0 Pi_0 V^{-m} Hermitian, and Gamma - W_0 >= 0.
inline OptimalityReport covariant_optimality_check(const ComplexMatrix& seed, int n, int M) {
  require_multi_args(n, M);
  if (seed.dim() != static_cast<std::size_t>(n) + 1) {
    throw DimensionMismatch("covariant_optimality_check: seed dimension " +
                            std::to_string(seed.dim()) + " != N+1");
  }
  const auto v = shift_operator(n, M);
  const auto w0 = multi_score_operator(n, M, 0).matrix;
  const ComplexMatrix w0_seed = w0 * seed;
  ComplexMatrix gamma(seed.dim());
  for (int m = 0; m < M; ++m) gamma += v.rotate(w0_seed, m);
  OptimalityReport r{gamma, gamma.hermiticity_residual(), {}, gamma.trace().real()};
  r.min_eig_gaps.push_back(min_eigenvalue_of_hermitian_part(gamma - w0));
  return r;
}

/// Eigenvectors |omega_k> of W_0 ordered by increasing eigenvalue
/// omega_k = (k+1)/((N+1)(N+2)); column k is |omega_k>.
inline EigenDecomposition w0_eigenbasis(int n, int M) {
  auto eig = eig_hermitian(multi_score_operator(n, M, 0).matrix);
  const std::size_t d = eig.source_dim;
  EigenDecomposition inc{std::vector<double>(d), ComplexMatrix(d), d};
  for (std::size_t j = 0; j < d; ++j) {
    inc.eigenvalues[j] = eig.eigenvalues[d - 1 - j];
    for (std::size_t k = 0; k < d; ++k) inc.eigenvectors(k, j) = eig.eigenvectors(k, d - 1 - j);
  }
  return inc;
}

/// |<omega_k|v>| for k = 0..N.
inline std::vector<double> w0_eigenbasis_overlaps(const ComplexVector& v, int n, int M) {
  const auto basis = w0_eigenbasis(n, M);
  std::vector<double> out(basis.source_dim);
  for (std::size_t k = 0; k < basis.source_dim; ++k) {
    out[k] = std::abs(inner(basis.column(k), v));
  }
  return out;
}

enum class KnownCase { M3N3, M3N4 };

struct KnownPom {
  CovariantPom pom;
  double score;
  EigenDecomposition seed_eigen;
};

/// Exact rank-two optimal seeds for (M, N) = (3, 3) and (3, 4), with their
/// closed-form scores.
inline KnownPom known_pom(KnownCase which) {
  const double third = 1.0 / 3.0;
  if (which == KnownCase::M3N3) {
    const double a = (std::sqrt(21.0) + std::sqrt(5.0)) / 24.0;
    const double c = (std::sqrt(35.0) - std::sqrt(3.0)) / 24.0;
    const double b = 6.0 * a * c;
    ComplexMatrix s(4);
    const double rows[4][4] = {{third, a, c, 0}, {a, third, b, c}, {c, b, third, a}, {0, c, a, third}};
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t l = 0; l < 4; ++l) s(k, l) = rows[k][l];
    const double score = (5.0 + 3.0 * std::sqrt(3.0) * a + 3.0 * b) / 10.0;
    auto eig = eig_hermitian(s);
    return {{std::move(s), 3, 3}, score, std::move(eig)};
  }
  const double b = std::sqrt(29.0 + std::sqrt(201.0)) / 24.0;
  const double c = (std::sqrt(67.0) - std::sqrt(3.0)) / (24.0 * std::sqrt(2.0));
  const double a = 6.0 * b * c;
  const double r = std::sqrt(3.0 / 8.0) * c;
  ComplexMatrix s(5);
  const double rows[5][5] = {{third, a, c, 0, -r},
                             {a, third, b, r, 0},
                             {c, b, third, b, c},
                             {0, r, b, third, a},
                             {-r, 0, c, a, third}};
  for (std::size_t k = 0; k < 5; ++k)
    for (std::size_t l = 0; l < 5; ++l) s(k, l) = rows[k][l];
  const double score = (5.0 + 4.0 * a + 2.0 * std::sqrt(6.0) * b) / 10.0;
  auto eig = eig_hermitian(s);
  return {{std::move(s), 4, 3}, score, std::move(eig)};
}

struct OptimizerResult {
  CovariantPom pom;
  double score;
  int iterations;
  bool converged;
  std::vector<double> score_trace;
};

/// Fixed-point search for the optimal POM:
///   R = sum_m W_m Pi_m W_m,   Pi_m <- R^{-1/2} W_m Pi_m W_m R^{-1/2},
/// which keeps sum_m Pi_m = I at every step. Starts from a full-rank
/// covariant seed (half the rescaled SRM projector, half I/M) and stops once
/// the per-step score gain drops below conv_tol. The result is averaged over
/// the V orbit so it is exactly covariant.
inline OptimizerResult covariant_pom_optimizer(int n, int M, int max_iters = 10000,
                                               double conv_tol = 1e-12) {
  require_multi_args(n, M);
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  const auto v = shift_operator(n, M);
  const auto scores = multi_score_operators(n, M);

  ComplexVector mu0(dim, complex{1.0 / std::sqrt(static_cast<double>(M)), 0.0});
  ComplexMatrix seed = ComplexMatrix::outer(mu0, mu0) * complex{0.5 * (n + 1.0) / M, 0.0} +
                       ComplexMatrix::identity(dim) * complex{0.5 / M, 0.0};
  ComplexMatrix orbit_sum(dim);
  for (int m = 0; m < M; ++m) orbit_sum += v.rotate(seed, m);
  const auto fix = inv_sqrt_psd(orbit_sum);
  seed = fix * seed * fix;

  std::vector<ComplexMatrix> pis = CovariantPom{seed, n, M}.elements();
  auto score_of = [&](const std::vector<ComplexMatrix>& p) {
    double s = 0.0;
    for (std::size_t m = 0; m < p.size(); ++m) s += trace_of_product(scores[m].matrix, p[m]).real();
    return s;
  };

  OptimizerResult out{CovariantPom{seed, n, M}, score_of(pis), 0, false, {}};
  out.score_trace.push_back(out.score);
  std::vector<ComplexMatrix> best = pis;
  double best_score = out.score;

  for (int it = 1; it <= max_iters; ++it) {
    std::vector<ComplexMatrix> q;
    q.reserve(pis.size());
    ComplexMatrix r(dim);
    for (std::size_t m = 0; m < pis.size(); ++m) {
      q.push_back(scores[m].matrix * pis[m] * scores[m].matrix);
      r += q.back();
    }
    const auto t = inv_sqrt_psd(r.hermitian_part());
    for (std::size_t m = 0; m < pis.size(); ++m) pis[m] = (t * q[m] * t).hermitian_part();

    const double s = score_of(pis);
    const double gain = s - out.score_trace.back();
    out.score_trace.push_back(s);
    out.iterations = it;
    if (s > best_score) {
      best_score = s;
      best = pis;
    }
    if (gain < conv_tol) {
      out.converged = true;
      break;
    }
  }

  ComplexMatrix sym(dim);
  for (int m = 0; m < M; ++m) sym += v.rotate(best[static_cast<std::size_t>(m)], -m);
  sym *= complex{1.0 / M, 0.0};
  out.pom = CovariantPom{sym.hermitian_part(), n, M};
  out.score = average_score(out.pom.to_pom(), scores);
  return out;
}

/// M = 2: the two score operators commute, and measuring every copy in the
/// template basis with a majority vote is optimal.
struct CommutingCheck {
  double commutator_norm;
  Pom pom;
  OptimalityReport report;

  bool passed(double commutator_tol = 1e-12) const {
    return commutator_norm <= commutator_tol && report.passes();
  }
};

/// Diagonalizes W_0 (non-degenerate), which also diagonalizes W_1, and gives
/// each common eigenvector to the template with the larger eigenvalue
/// (ties to template 0).
inline CommutingCheck m2_commuting_check(int n) {
  require_copies(n);
  const auto scores = multi_score_operators(n, 2);
  const double comm = commutator(scores[0].matrix, scores[1].matrix).max_abs();
  const auto eig = eig_hermitian(scores[0].matrix);
  const std::size_t dim = eig.source_dim;
  ComplexMatrix pi0(dim), pi1(dim);
  for (std::size_t j = 0; j < dim; ++j) {
    const auto vec = eig.column(j);
    const double a = inner(vec, scores[0].matrix.apply(vec)).real();
    const double b = inner(vec, scores[1].matrix.apply(vec)).real();
    (a >= b - 1e-14 ? pi0 : pi1) += ComplexMatrix::outer(vec, vec);
  }
  Pom pom{{std::move(pi0), std::move(pi1)}, {"g0", "g1"}, BasisTag::UpDown};
  auto report = verify_optimality(pom, scores);
  return {comm, std::move(pom), std::move(report)};
}

/// Rank-one orbit of the top eigenvector of W_0 scaled by (N+1)/M, i.e. the
/// candidate optimum for an irreducible representation. For M > N the orbit
/// sums to (N+1) diag(|v_k|^2), which is not I once N >= 2.
inline CovariantPom top_eigenvector_orbit(int n, int M) {
  require_multi_args(n, M);
  const auto eig = eig_hermitian(multi_score_operator(n, M, 0).matrix);
  const auto top = eig.column(0);
  return {ComplexMatrix::outer(top, top) * complex{(n + 1.0) / M, 0.0}, n, M};
}

}  // namespace qtm
