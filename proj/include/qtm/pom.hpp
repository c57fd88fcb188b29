#pragma once

// Measurements (probability operator measures), the Bayes average score and
// the Holevo-Yuen optimality certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"
#include "qtm/qstates.hpp"
#include "qtm/scoreops.hpp"

namespace qtm {

inline constexpr double kPomTol = 1e-10;

/// Ordered PSD operators resolving the identity; element j answers "template j".
struct Pom {
  std::vector<ComplexMatrix> elements;
  std::vector<std::string> labels;
  BasisTag basis = BasisTag::UpDown;

  std::size_t size() const noexcept { return elements.size(); }
  std::size_t dim() const { return elements.empty() ? 0 : elements.front().dim(); }

  /// max |sum_j Pi_j - I|
  double completeness_residual() const {
    if (elements.empty()) return std::numeric_limits<double>::infinity();
    ComplexMatrix s(dim());
    for (const auto& e : elements) s += e;
    return max_abs_diff(s, ComplexMatrix::identity(dim()));
  }

  double min_element_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& e : elements) lo = std::min(lo, min_eigenvalue_of_hermitian_part(e));
    return lo;
  }

  bool is_valid(double tol = kPomTol) const {
    for (const auto& e : elements)
      if (e.hermiticity_residual() > tol) return false;
    return completeness_residual() <= tol && min_element_eigenvalue() >= -tol;
  }
};

namespace detail {

inline void require_compatible(const Pom& pom, std::span<const ScoreOperator> scores) {
  if (pom.size() != scores.size()) {
    throw DimensionMismatch("POM has " + std::to_string(pom.size()) + " elements but " +
                            std::to_string(scores.size()) + " score operators were given");
  }
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (pom.elements[j].dim() != scores[j].dim()) {
      throw DimensionMismatch("POM element " + std::to_string(j) + " dimension mismatch");
    }
    require_same_basis(pom.basis, scores[j].basis, "average_score");
  }
}

}  // namespace detail

/// sum_j Tr(W_j Pi_j). The imaginary part (rounding only) is discarded.
inline double average_score(const Pom& pom, std::span<const ScoreOperator> scores) {
  detail::require_compatible(pom, scores);
  complex s = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    s += trace_of_product(scores[j].matrix, pom.elements[j]);
  }
  return s.real();
}

/// Gamma = sum_j W_j Pi_j together with the two optimality conditions:
/// Gamma Hermitian and Gamma - W_j >= 0 for every j.
struct OptimalityReport {
  ComplexMatrix gamma;
  double hermiticity_residual;
  std::vector<double> min_eig_gaps;
  double score;

  double worst_gap() const {
    return min_eig_gaps.empty() ? 0.0 : *std::min_element(min_eig_gaps.begin(), min_eig_gaps.end());
  }

  bool hermitian(double tol = 1e-10) const { return hermiticity_residual <= tol; }
  bool dominant(double tol = 1e-9) const { return worst_gap() >= -tol; }

  bool passes(double hermiticity_tol = 1e-10, double gap_tol = 1e-9) const {
    return hermitian(hermiticity_tol) && dominant(gap_tol);
  }
};

/// Reports, never throws on a failed condition. Gaps are the smallest
/// eigenvalue of the Hermitian part of Gamma - W_j.
inline OptimalityReport verify_optimality(const Pom& pom, std::span<const ScoreOperator> scores) {
  detail::require_compatible(pom, scores);
  ComplexMatrix gamma(pom.dim());
  for (std::size_t j = 0; j < scores.size(); ++j) gamma += scores[j].matrix * pom.elements[j];
  OptimalityReport r{gamma, gamma.hermiticity_residual(), {}, gamma.trace().real()};
  r.min_eig_gaps.reserve(scores.size());
  for (const auto& w : scores) {
    r.min_eig_gaps.push_back(min_eigenvalue_of_hermitian_part(gamma - w.matrix));
  }
  return r;
}

}  // namespace qtm
