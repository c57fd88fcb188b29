#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qtm/multi.hpp"
#include "qtm/scoreops.hpp"

using qtm::ComplexMatrix;

constexpr double kPi = std::numbers::pi;

TEST(DoubleFactorial, Conventions) {
  EXPECT_EQ(qtm::detail::exact_double_factorial(-1), 1u);
  EXPECT_EQ(qtm::detail::exact_double_factorial(0), 1u);
  EXPECT_EQ(qtm::detail::exact_double_factorial(7), 105u);
  EXPECT_EQ(qtm::detail::exact_double_factorial(8), 384u);
  for (int n = -1; n <= 40; ++n) {
    EXPECT_NEAR(qtm::detail::log_double_factorial(n),
                std::log(static_cast<double>(qtm::detail::exact_double_factorial(n))), 1e-11)
        << n;
  }
}

TEST(DoubleFactorial, RatioExactAndLogAgree) {
  for (int n = 2; n <= 20; ++n)
    for (int s = 0; s <= 2 * n; s += 2) {
      const double exact = qtm::detail::double_factorial_ratio(s - 1, 2 * n - s - 1, 2 * n, n);
      const double logv = qtm::detail::double_factorial_ratio(s - 1, 2 * n - s - 1, 2 * n, 99);
      EXPECT_NEAR(logv / exact, 1.0, 1e-12);
    }
}

// Closed form against the projected 2^N tensor-product average.
TEST(BinaryScoreOperator, MatchesTensorOracle) {
  for (int n = 1; n <= 7; ++n)
    for (double theta : {0.0, 0.3, kPi / 4, 1.4, kPi / 2})
      for (int j = 0; j < 2; ++j) {
        const auto w = qtm::binary_score_operator(n, theta, j);
        const auto ref = oracle::binary_w_tensor(n, theta, j, 4 * n + 8);
        EXPECT_LT(oracle::max_abs(oracle::to_eigen(w.matrix) - ref), 1e-13)
            << "n=" << n << " theta=" << theta << " j=" << j;
      }
}

TEST(BinaryScoreOperator, DiffOperatorAndAntidiagonalSymmetry) {
  for (int n = 1; n <= 15; ++n)
    for (double theta : {0.0, 0.7}) {
      const auto d = qtm::binary_diff_operator(n, theta);
      const auto w0 = qtm::binary_score_operator(n, theta, 0).matrix;
      const auto w1 = qtm::binary_score_operator(n, theta, 1).matrix;
      EXPECT_LT(max_abs_diff(d, w0 - w1), 1e-14);
      for (int k = 0; k <= n; ++k)
        for (int l = 0; l <= n; ++l) EXPECT_NEAR(d(k, l).real(), -d(n - k, n - l).real(), 1e-15);
    }
}

// The v-basis operators are the same operators in another basis, so the
// spectra agree.
TEST(BinaryScoreOperator, VBasisIsUnitarilyEquivalent) {
  for (int n = 1; n <= 10; ++n)
    for (double theta : {0.0, kPi / 6, kPi / 3})
      for (int j = 0; j < 2; ++j) {
        const auto a = qtm::eig_hermitian(qtm::binary_score_operator(n, theta, j).matrix);
        const auto b = qtm::eig_hermitian(qtm::binary_score_operator_vbasis(n, theta, j).matrix);
        for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
          EXPECT_NEAR(a.eigenvalues[i], b.eigenvalues[i], 1e-13);
      }
}

TEST(BinaryScoreOperator, VBasisW1IsConjugateOfW0) {
  const auto w0 = qtm::binary_score_operator_vbasis(5, 0.4, 0).matrix;
  const auto w1 = qtm::binary_score_operator_vbasis(5, 0.4, 1).matrix;
  for (std::size_t k = 0; k < 6; ++k)
    for (std::size_t l = 0; l < 6; ++l) EXPECT_EQ(w1(k, l), std::conj(w0(k, l)));
}

TEST(BinaryScoreOperator, ArgumentChecks) {
  EXPECT_THROW(qtm::binary_score_operator(3, 0.1, 2), qtm::IndexError);
  EXPECT_THROW(qtm::binary_score_operator(3, -0.1, 0), qtm::DomainError);
  EXPECT_THROW(qtm::binary_score_operator(0, 0.1, 0), qtm::DomainError);
  EXPECT_THROW(qtm::binary_score_operator_vbasis(3, 0.1, -1), qtm::IndexError);
}

// Property: every score operator is Hermitian, PSD, with trace 1/2.
TEST(ScoreOperatorInvariants, RandomSettings) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> copies(1, 40);
  std::uniform_real_distribution<double> angle(0.0, kPi / 2);
  std::uniform_int_distribution<int> templates(2, 9);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = copies(rng);
    const double theta = angle(rng);
    const int j = trial % 2;
    for (const auto& w : {qtm::binary_score_operator(n, theta, j),
                          qtm::binary_score_operator_vbasis(n, theta, j)}) {
      const auto v = qtm::score_operator_violations(w, 1e-11);
      EXPECT_TRUE(v.empty()) << "n=" << n << " theta=" << theta << " " << (v.empty() ? "" : v[0]);
    }
    const int M = templates(rng);
    const auto wm = qtm::multi_score_operator(n, M, trial % M);
    EXPECT_TRUE(qtm::score_operator_violations(wm).empty()) << "n=" << n << " M=" << M;
  }
}

TEST(ScoreOperatorInvariants, ViolationsAreReported) {
  auto w = qtm::binary_score_operator(3, 0.0, 0);
  w.matrix(0, 0) += 0.1;
  EXPECT_EQ(qtm::score_operator_violations(w), std::vector<std::string>{"trace != 1/2"});
  w.matrix(0, 1) += 0.1;
  EXPECT_FALSE(qtm::score_operator_violations(w).empty());
}

TEST(MultiScoreOperator, CovariantUnderShift) {
  for (int n = 1; n <= 9; ++n)
    for (int M : {2, 3, 5, 8}) {
      const auto v = qtm::shift_operator(n, M);
      const auto w0 = qtm::multi_score_operator(n, M, 0).matrix;
      for (int m = 0; m < M; ++m) {
        const auto wm = qtm::multi_score_operator(n, M, m).matrix;
        EXPECT_LT(max_abs_diff(wm, v.rotate(w0, m)), 1e-15);
        const auto explicit_rot = v.power(m) * w0 * v.power(-m);
        EXPECT_LT(max_abs_diff(wm, explicit_rot), 1e-14);
      }
    }
}

// Independent of the library quadrature: midpoint rule in cos(polar) with
// many nodes, explicit tensor-product states.
TEST(MultiScoreOperator, MatchesBruteForceSphereAverage) {
  for (int n = 1; n <= 4; ++n)
    for (int M : {2, 3, 5}) {
      const oracle::MatrixXcd emb = oracle::symmetric_embedding(n);
      const int polar_nodes = 600, az_nodes = 4 * (n + 2);
      oracle::MatrixXcd acc = oracle::MatrixXcd::Zero(n + 1, n + 1);
      const auto g = qtm::uniform_template(1 % M, M);
      for (int p = 0; p < polar_nodes; ++p) {
        const double x = -1.0 + 2.0 * (p + 0.5) / polar_nodes;
        const double t = std::acos(x);
        for (int a = 0; a < az_nodes; ++a) {
          const double phi = 2 * kPi * a / az_nodes;
          const auto f = qtm::sphere_state(t, phi);
          const oracle::VectorXcd v = emb.adjoint() * oracle::tensor_power(f.amp_up(), f.amp_down(), n);
          acc += qtm::overlap_sq(f, g) / (polar_nodes * az_nodes) * v * v.adjoint();
        }
      }
      const auto w = qtm::multi_score_operator(n, M, 1 % M).matrix;
      EXPECT_LT(oracle::max_abs(oracle::to_eigen(w) - acc), 1e-5) << "n=" << n << " M=" << M;
    }
}

TEST(MultiScoreOperator, EigenvaluesAreLinear) {
  for (int n = 1; n <= 12; ++n) {
    const auto e = qtm::eig_hermitian(qtm::multi_score_operator(n, 3, 0).matrix);
    for (int k = 0; k <= n; ++k) {
      EXPECT_NEAR(e.eigenvalues[n - k], (k + 1.0) / ((n + 1.0) * (n + 2.0)), 1e-14);
    }
  }
}

TEST(MultiScoreOperator, ArgumentChecks) {
  EXPECT_THROW(qtm::multi_score_operator(3, 1, 0), qtm::DomainError);
  EXPECT_THROW(qtm::multi_score_operator(3, 3, 3), qtm::IndexError);
}

TEST(Quadrature, FullSphereNeedsUpDownTemplates) {
  const auto [g0, g1] = qtm::template_pair_vbasis(0.1);
  const qtm::QubitState ts[] = {g0, g1};
  EXPECT_THROW(qtm::score_operator_quadrature(2, ts, qtm::InputPrior::FullSphere, 0),
               qtm::BasisMismatch);
  EXPECT_THROW(qtm::score_operator_quadrature(2, ts, qtm::InputPrior::BinaryCircle, 2),
               qtm::IndexError);
}

TEST(Quadrature, AgreesWithClosedFormsAtLargerN) {
  for (int n : {12, 20, 30}) {
    const auto [g0, g1] = qtm::template_pair(0.5);
    const qtm::QubitState ts[] = {g0, g1};
    for (int j = 0; j < 2; ++j) {
      const auto q = qtm::score_operator_quadrature(n, ts, qtm::InputPrior::BinaryCircle, j);
      EXPECT_LT(max_abs_diff(q.matrix, qtm::binary_score_operator(n, 0.5, j).matrix), 1e-12);
    }
    std::vector<qtm::QubitState> mt;
    for (int m = 0; m < 4; ++m) mt.push_back(qtm::uniform_template(m, 4));
    const auto q = qtm::score_operator_quadrature(n, mt, qtm::InputPrior::FullSphere, 3);
    EXPECT_LT(max_abs_diff(q.matrix, qtm::multi_score_operator(n, 4, 3).matrix), 1e-12);
  }
}
