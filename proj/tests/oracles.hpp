#pragma once

// Reference computations that avoid the library's closed forms: explicit
// 2^N tensor products, brute-force quadrature and Eigen eigensolvers.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qtm/qtm.hpp"

namespace oracle {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

inline MatrixXcd to_eigen(const qtm::ComplexMatrix& a) {
  MatrixXcd out(a.dim(), a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k)
    for (std::size_t l = 0; l < a.dim(); ++l) out(k, l) = a(k, l);
  return out;
}

inline qtm::ComplexMatrix from_eigen(const MatrixXcd& a) {
  qtm::ComplexMatrix out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    for (Eigen::Index l = 0; l < a.cols(); ++l) out(k, l) = a(k, l);
  return out;
}

inline double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

/// |q>^{(x)n} as a 2^n vector; bit i of the index set means copy i is "down".
inline VectorXcd tensor_power(cd up, cd down, int n) {
  VectorXcd v = VectorXcd::Ones(1);
  for (int i = 0; i < n; ++i) {
    VectorXcd next(v.size() * 2);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      next(2 * j) = v(j) * up;
      next(2 * j + 1) = v(j) * down;
    }
    v = next;
  }
  return v;
}

/// Isometry from the symmetric subspace into (C^2)^{(x)n}: column k is the
/// normalized uniform superposition of bit strings with k ones.
inline MatrixXcd symmetric_embedding(int n) {
  const Eigen::Index full = Eigen::Index{1} << n;
  MatrixXcd e = MatrixXcd::Zero(full, n + 1);
  for (Eigen::Index idx = 0; idx < full; ++idx) {
    const int k = __builtin_popcountll(static_cast<unsigned long long>(idx));
    e(idx, k) = 1.0;
  }
  for (int k = 0; k <= n; ++k) e.col(k).normalize();
  return e;
}

/// N-copy bosonic amplitudes obtained by projecting the full tensor product.
inline VectorXcd bosonic_via_tensor(cd up, cd down, int n) {
  return symmetric_embedding(n).adjoint() * tensor_power(up, down, n);
}

/// W_j for the great-circle prior by trapezoidal averaging of the projected
/// tensor-product state, with `points` samples (exact for points > 2N+2).
inline MatrixXcd binary_w_tensor(int n, double theta, int j, int points) {
  const MatrixXcd emb = symmetric_embedding(n);
  const double tj = j == 0 ? theta : std::numbers::pi - theta;
  MatrixXcd acc = MatrixXcd::Zero(n + 1, n + 1);
  for (int i = 0; i < points; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.5) / points;
    const double c = std::cos(phi / 2), s = std::sin(phi / 2);
    const VectorXcd f = emb.adjoint() * tensor_power(c, s, n);
    const double fid = std::pow(std::cos((phi - tj) / 2), 2);
    acc += fid / points * f * f.adjoint();
  }
  return acc;
}

/// Majority voting judged outcome by outcome: every copy measured in the
/// up/down basis gives k "down" results with probability C(N,k) cos^{2(N-k)} sin^{2k};
/// the vote picks template 0 when k <= N/2. Averaged over the circle.
inline double majority_voting_classical(int n, double theta, int points = 4096) {
  double total = 0.0;
  for (int i = 0; i < points; ++i) {
    const double phi = 2.0 * std::numbers::pi * (i + 0.5) / points;
    const double c2 = std::pow(std::cos(phi / 2), 2), s2 = 1.0 - c2;
    for (int k = 0; k <= n; ++k) {
      const double p = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) *
                       std::pow(c2, n - k) * std::pow(s2, k);
      const double tj = k <= n / 2 ? theta : std::numbers::pi - theta;
      total += p * std::pow(std::cos((phi - tj) / 2), 2);
    }
  }
  return total / points;
}

/// Helstrom-type optimum for two operators: 1/2 + sum of positive eigenvalues
/// of W0 - W1, through Eigen.
inline double binary_optimum_eigen(const MatrixXcd& w0, const MatrixXcd& w1) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(w0 - w1);
  double s = 0.5 * (w0 + w1).trace().real();
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    s += std::max(0.0, es.eigenvalues()(i));
  return s;
}

inline qtm::ComplexMatrix random_hermitian(std::mt19937_64& rng, std::size_t dim,
                                           double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  qtm::ComplexMatrix a(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    a(k, k) = g(rng);
    for (std::size_t l = k + 1; l < dim; ++l) {
      a(k, l) = cd{g(rng), g(rng)};
      a(l, k) = std::conj(a(k, l));
    }
  }
  return a;
}

/// B^dag B for a random B of the given rank.
inline qtm::ComplexMatrix random_psd(std::mt19937_64& rng, std::size_t dim, std::size_t rank) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd b(rank, dim);
  for (std::size_t r = 0; r < rank; ++r)
    for (std::size_t k = 0; k < dim; ++k) b(r, k) = cd{g(rng), g(rng)};
  return from_eigen(b.adjoint() * b);
}

inline qtm::QubitState random_qubit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  cd a{g(rng), g(rng)}, b{g(rng), g(rng)};
  const double r = std::sqrt(std::norm(a) + std::norm(b));
  return {a / r, b / r};
}

}  // namespace oracle
