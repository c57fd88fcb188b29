#pragma once

// Dense complex linear algebra for the small operators that live on the
// (N+1)-dimensional symmetric subspace: a square matrix type, a cyclic
// Jacobi eigensolver for Hermitian matrices, PSD tests and inverse square
// roots restricted to the support.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtm/error.hpp"

namespace qtm {

using complex = std::complex<double>;
using ComplexVector = std::vector<complex>;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kRankTol = 1e-12;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  static constexpr std::size_t kMaxDim = 64;

  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim == 0 || dim > kMaxDim) {
      throw DomainError("ComplexMatrix: dimension " + std::to_string(dim) +
                        " outside [1, 64]");
    }
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t k = 0; k < dim; ++k) m(k, k) = 1.0;
    return m;
  }

  static ComplexMatrix diagonal(std::span<const complex> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t k = 0; k < diag.size(); ++k) m(k, k) = diag[k];
    return m;
  }

  static ComplexMatrix diagonal(std::span<const double> diag) {
    ComplexMatrix m(diag.size());
    for (std::size_t k = 0; k < diag.size(); ++k) m(k, k) = diag[k];
    return m;
  }

  /// |u><v|
  static ComplexMatrix outer(std::span<const complex> u,
                             std::span<const complex> v) {
    if (u.size() != v.size()) {
      throw DimensionMismatch("outer: vector lengths differ");
    }
    ComplexMatrix m(u.size());
    for (std::size_t k = 0; k < u.size(); ++k)
      for (std::size_t l = 0; l < v.size(); ++l) m(k, l) = u[k] * std::conj(v[l]);
    return m;
  }

  std::size_t dim() const noexcept { return dim_; }

  complex& operator()(std::size_t k, std::size_t l) noexcept {
    assert(k < dim_ && l < dim_);
    return data_[k * dim_ + l];
  }
  const complex& operator()(std::size_t k, std::size_t l) const noexcept {
    assert(k < dim_ && l < dim_);
    return data_[k * dim_ + l];
  }

  const complex& at(std::size_t k, std::size_t l) const {
    if (k >= dim_ || l >= dim_) throw IndexError("ComplexMatrix::at out of range");
    return data_[k * dim_ + l];
  }

  std::span<const complex> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const {
    ComplexMatrix m(dim_);
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t l = 0; l < dim_; ++l) m(l, k) = std::conj((*this)(k, l));
    return m;
  }

  complex trace() const noexcept {
    complex t = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) t += (*this)(k, k);
    return t;
  }

  /// Largest entry modulus.
  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& z : data_) m = std::max(m, std::abs(z));
    return m;
  }

  double frobenius_norm() const noexcept {
    double s = 0.0;
    for (const auto& z : data_) s += std::norm(z);
    return std::sqrt(s);
  }

  /// max |A - A^dagger|
  double hermiticity_residual() const noexcept {
    double r = 0.0;
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t l = k; l < dim_; ++l)
        r = std::max(r, std::abs((*this)(k, l) - std::conj((*this)(l, k))));
    return r;
  }

  ComplexMatrix hermitian_part() const {
    ComplexMatrix h(dim_);
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t l = 0; l < dim_; ++l)
        h(k, l) = 0.5 * ((*this)(k, l) + std::conj((*this)(l, k)));
    return h;
  }

  ComplexVector apply(std::span<const complex> v) const {
    if (v.size() != dim_) throw DimensionMismatch("apply: vector length mismatch");
    ComplexVector out(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      complex s = 0.0;
      for (std::size_t l = 0; l < dim_; ++l) s += (*this)(k, l) * v[l];
      out[k] = s;
    }
    return out;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    require_same_dim(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  ComplexMatrix& operator*=(complex s) noexcept {
    for (auto& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, complex s) { return a *= s; }
  friend ComplexMatrix operator*(complex s, ComplexMatrix a) { return a *= s; }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    a.require_same_dim(b);
    const std::size_t n = a.dim_;
    ComplexMatrix c(n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) {
        const complex akj = a(k, j);
        if (akj == complex{}) continue;
        for (std::size_t l = 0; l < n; ++l) c(k, l) += akj * b(j, l);
      }
    return c;
  }

 private:
  void require_same_dim(const ComplexMatrix& o) const {
    if (o.dim_ != dim_) {
      throw DimensionMismatch("matrix dimensions differ: " + std::to_string(dim_) +
                              " vs " + std::to_string(o.dim_));
    }
  }

  std::size_t dim_;
  std::vector<complex> data_;
};

/// max |A - B| entrywise.
inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).max_abs();
}

/// Tr(A B) without forming the product.
inline complex trace_of_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("trace_of_product: dimension mismatch");
  complex t = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    for (std::size_t l = 0; l < a.dim(); ++l) t += a(k, l) * b(l, k);
  return t;
}

/// U A U^dagger
inline ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& a) {
  return u * a * u.adjoint();
}

inline ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

inline complex inner(std::span<const complex> u, std::span<const complex> v) {
  if (u.size() != v.size()) throw DimensionMismatch("inner: vector lengths differ");
  complex s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += std::conj(u[k]) * v[k];
  return s;
}

inline double norm(std::span<const complex> v) { return std::sqrt(std::real(inner(v, v))); }

/// e^{i pi p / q}, exact at multiples of a quarter turn.
inline complex cis_pi(long long p, long long q) {
  if (q == 0) throw DomainError("cis_pi: zero denominator");
  if (q < 0) { p = -p; q = -q; }
  // p/q in units of pi; reduce modulo 2.
  long long r = p % (2 * q);
  if (r < 0) r += 2 * q;
  if ((2 * r) % q == 0) {
    switch ((2 * r) / q) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, -1.0};
    }
  }
  const double angle = M_PI * static_cast<double>(r) / static_cast<double>(q);
  return {std::cos(angle), std::sin(angle)};
}

/// Spectrum of a Hermitian matrix. Eigenvalues are sorted non-increasing and
/// column j of `eigenvectors` belongs to eigenvalue j.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;
  std::size_t source_dim;

  ComplexVector column(std::size_t j) const {
    ComplexVector v(source_dim);
    for (std::size_t k = 0; k < source_dim; ++k) v[k] = eigenvectors(k, j);
    return v;
  }

  /// V f(diag(lambda)) V^dagger
  template <typename F>
  ComplexMatrix reconstruct(F&& f) const {
    ComplexMatrix out(source_dim);
    for (std::size_t j = 0; j < source_dim; ++j) {
      const double w = f(eigenvalues[j]);
      if (w == 0.0) continue;
      for (std::size_t k = 0; k < source_dim; ++k) {
        const complex vk = w * eigenvectors(k, j);
        for (std::size_t l = 0; l < source_dim; ++l)
          out(k, l) += vk * std::conj(eigenvectors(l, j));
      }
    }
    return out;
  }

  ComplexMatrix reconstruct() const {
    return reconstruct([](double x) { return x; });
  }
};

namespace detail {

inline constexpr int kMaxJacobiSweeps = 100;
inline constexpr double kOffDiagonalTarget = 1e-13;

inline double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.dim(); ++k)
    for (std::size_t l = 0; l < a.dim(); ++l)
      if (k != l) s += std::norm(a(k, l));
  return std::sqrt(s);
}

// Zero a(p,q) with the unitary J = diag(1, conj(e)) * [[c, s], [-s, c]] on
// columns p,q, where e = a(p,q)/|a(p,q)|. Applies A <- J^dag A J, V <- V J.
inline void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const complex apq = a(p, q);
  const double r = std::abs(apq);
  if (r == 0.0) return;
  const complex e = apq / r;
  const complex ec = std::conj(e);
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double theta = (aqq - app) / (2.0 * r);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const complex akp = a(k, p);
    const complex akq = a(k, q);
    a(k, p) = c * akp - s * ec * akq;
    a(k, q) = s * akp + c * ec * akq;
  }
  for (std::size_t l = 0; l < n; ++l) {
    const complex apl = a(p, l);
    const complex aql = a(q, l);
    a(p, l) = c * apl - s * e * aql;
    a(q, l) = s * apl + c * e * aql;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * r;
  a(q, q) = aqq + t * r;

  for (std::size_t k = 0; k < n; ++k) {
    const complex vkp = v(k, p);
    const complex vkq = v(k, q);
    v(k, p) = c * vkp - s * ec * vkq;
    v(k, q) = s * vkp + c * ec * vkq;
  }
}

// Index of the largest-modulus component; near-equal moduli resolve to the
// smallest index.
inline std::size_t dominant_index(const ComplexMatrix& v, std::size_t col) {
  double best = 0.0;
  for (std::size_t k = 0; k < v.dim(); ++k) best = std::max(best, std::abs(v(k, col)));
  for (std::size_t k = 0; k < v.dim(); ++k)
    if (std::abs(v(k, col)) >= best - 1e-12) return k;
  return 0;
}

}  // namespace detail

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back non-increasing. Eigenvalues within 1e-12 (relative to
/// the spectral radius, floored at 1) count as ties and are ordered by the
/// index of their eigenvector's dominant component. Each eigenvector is
/// phased so that its dominant component is real and positive.
inline EigenDecomposition eig_hermitian(const ComplexMatrix& input,
                                        double tol = kHermitianTol) {
  const double residual = input.hermiticity_residual();
  if (residual > tol) {
    throw NotHermitian("eig_hermitian: |A - A^dag|_max = " + std::to_string(residual));
  }
  const std::size_t n = input.dim();
  ComplexMatrix a = input.hermitian_part();
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double target = detail::kOffDiagonalTarget * std::max(1.0, a.frobenius_norm());
  bool converged = detail::off_diagonal_norm(a) <= target;
  for (int sweep = 0; sweep < detail::kMaxJacobiSweeps && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) detail::jacobi_rotate(a, v, p, q);
    converged = detail::off_diagonal_norm(a) <= target;
  }
  if (!converged) {
    throw NoConvergence("eig_hermitian: off-diagonal norm " +
                        std::to_string(detail::off_diagonal_norm(a)) + " after " +
                        std::to_string(detail::kMaxJacobiSweeps) + " sweeps");
  }

  std::vector<double> lambda(n);
  for (std::size_t k = 0; k < n; ++k) lambda[k] = a(k, k).real();

  // Fix phases first so that the dominant index is well defined.
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t d = detail::dominant_index(v, j);
    const complex z = v(d, j);
    const complex phase = std::conj(z) / std::abs(z);
    for (std::size_t k = 0; k < n; ++k) v(k, j) *= phase;
    v(d, j) = std::abs(z);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return lambda[x] > lambda[y]; });

  double radius = 1.0;
  for (double x : lambda) radius = std::max(radius, std::abs(x));
  const double tie = 1e-12 * radius;
  for (std::size_t begin = 0; begin < n;) {
    std::size_t end = begin + 1;
    while (end < n && lambda[order[end - 1]] - lambda[order[end]] <= tie) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(begin),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t x, std::size_t y) {
                       return detail::dominant_index(v, x) < detail::dominant_index(v, y);
                     });
    begin = end;
  }

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n), n};
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = lambda[order[j]];
    for (std::size_t k = 0; k < n; ++k) out.eigenvectors(k, j) = v(k, order[j]);
  }
  return out;
}

struct PsdCheck {
  bool is_psd;
  double min_eigenvalue;
};

inline PsdCheck is_psd(const ComplexMatrix& a, double tol = kHermitianTol) {
  const auto eig = eig_hermitian(a, tol);
  const double lo = eig.eigenvalues.back();
  return {lo >= -tol, lo};
}

/// Smallest eigenvalue of the Hermitian part of `a`; never throws on
/// non-Hermitian input.
inline double min_eigenvalue_of_hermitian_part(const ComplexMatrix& a) {
  return eig_hermitian(a.hermitian_part()).eigenvalues.back();
}

/// Pseudo-inverse square root: B with B A B = projector onto supp(A).
/// Eigenvalues below rank_tol * lambda_max count as zero.
inline ComplexMatrix inv_sqrt_psd(const ComplexMatrix& a, double rank_tol = kRankTol) {
  const auto eig = eig_hermitian(a, kHermitianTol);
  const double top = eig.eigenvalues.front();
  const double floor = rank_tol * std::max(top, 0.0);
  if (eig.eigenvalues.back() < -floor || (top < 0.0)) {
    throw NegativeEigenvalue("inv_sqrt_psd: min eigenvalue " +
                             std::to_string(eig.eigenvalues.back()));
  }
  return eig.reconstruct([floor](double x) { return x > floor ? 1.0 / std::sqrt(x) : 0.0; });
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue above
/// rank_tol * lambda_max.
inline ComplexMatrix support_projector(const ComplexMatrix& a, double rank_tol = kRankTol) {
  const auto eig = eig_hermitian(a, kHermitianTol);
  const double floor = rank_tol * std::max(eig.eigenvalues.front(), 0.0);
  return eig.reconstruct([floor](double x) { return x > floor ? 1.0 : 0.0; });
}

}  // namespace qtm
