#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "causens/hsic.hpp"
#include "oracles.hpp"

using namespace causens;

TEST(Hsic, ConstantVariableGivesZero) {
  std::mt19937_64 rng(1);
  const DataMatrix x(Matrix::Constant(15, 1, 2.5));
  const DataMatrix y(oracle::random_matrix(rng, 15, 1));
  EXPECT_EQ(hsic(x, y, KernelConfig(1.0), KernelConfig(1.0)).statistic, 0.0);
}

TEST(Hsic, TwoPointHandComputation) {
  // K = [[1, a], [a, 1]], a = e^{-1/2}; H K H = ((1 - a)/2) [[1, -1], [-1, 1]],
  // Tr(H K H K) = (1 - a)^2, divided by n^2 = 4.
  const DataMatrix x = DataMatrix::column(std::vector<double>{0.0, 1.0});
  const double a = std::exp(-0.5);
  const auto v = hsic(x, x, KernelConfig(1.0), KernelConfig(1.0));
  EXPECT_NEAR(v.statistic, (1 - a) * (1 - a) / 4.0, 1e-16);
  EXPECT_NEAR(v.statistic, 0.25 * 2.0 * std::pow((1 - a) / 2.0, 2) * 2.0, 1e-16);
  EXPECT_EQ(v.n, 2);
  EXPECT_EQ(v.sigma_x, 1.0);
}

TEST(Hsic, MatchesQuadrupleSum) {
  std::mt19937_64 rng(20);
  const Matrix x = oracle::random_matrix(rng, 20, 1);
  Matrix y = oracle::random_matrix(rng, 20, 1);
  y += x.array().square().matrix();
  const double sx = 0.9;
  const double sy = 1.3;
  const double got = hsic(DataMatrix(x), DataMatrix(y), KernelConfig(sx), KernelConfig(sy)).statistic;
  const double ref = oracle::hsic_quadruple_sum(x, y, sx, sy);
  EXPECT_LE(std::abs(got - ref), 1e-10 * std::abs(ref));
}

TEST(Hsic, AutoBandwidthUsesMedianHeuristic) {
  std::mt19937_64 rng(21);
  const Matrix x = oracle::random_matrix(rng, 25, 1);
  const Matrix y = oracle::random_matrix(rng, 25, 2);
  const auto v = hsic(DataMatrix(x), DataMatrix(y));
  EXPECT_EQ(v.sigma_x, oracle::median_pairwise_distance(x));
  EXPECT_EQ(v.sigma_y, oracle::median_pairwise_distance(y));
}

TEST(Hsic, ShapeMismatch) {
  std::mt19937_64 rng(2);
  try {
    hsic(DataMatrix(oracle::random_matrix(rng, 5, 1)), DataMatrix(oracle::random_matrix(rng, 6, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Hsic, DegenerateAutoBandwidthPropagates) {
  std::mt19937_64 rng(2);
  try {
    hsic(DataMatrix(Matrix::Ones(5, 1)), DataMatrix(oracle::random_matrix(rng, 5, 1)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateData);
  }
}

TEST(HsicProperties, Symmetric) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const DataMatrix x(oracle::random_matrix(rng, 10 + trial, 1));
    const DataMatrix y(oracle::random_matrix(rng, 10 + trial, 2));
    const KernelConfig cx(0.5 + 0.1 * trial);
    const KernelConfig cy(1.1);
    const double a = hsic(x, y, cx, cy).statistic;
    const double b = hsic(y, x, cy, cx).statistic;
    EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
  }
}

TEST(HsicProperties, PermutationInvariant) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 8 + trial;
    const Matrix x = oracle::random_matrix(rng, n, 1);
    const Matrix y = x.array().sin().matrix() + oracle::random_matrix(rng, n, 1, 0.3);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix xp(n, 1);
    Matrix yp(n, 1);
    for (int i = 0; i < n; ++i) {
      xp.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
      yp.row(i) = y.row(perm[static_cast<std::size_t>(i)]);
    }
    const KernelConfig c(0.8);
    const double a = hsic(DataMatrix(x), DataMatrix(y), c, c).statistic;
    const double b = hsic(DataMatrix(xp), DataMatrix(yp), c, c).statistic;
    EXPECT_LE(std::abs(a - b), 1e-12 * std::abs(a));
  }
}

TEST(HsicProperties, IndependentBelowDependent) {
  std::mt19937_64 rng(24);
  double independent = 0.0;
  double dependent = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const Matrix x = oracle::random_matrix(rng, 500, 1);
    const Matrix y_ind = oracle::random_matrix(rng, 500, 1);
    const Matrix y_dep = x + oracle::random_matrix(rng, 500, 1, 0.1);
    independent += hsic(DataMatrix(x), DataMatrix(y_ind)).statistic;
    dependent += hsic(DataMatrix(x), DataMatrix(y_dep)).statistic;
  }
  EXPECT_LT(independent / 20, dependent / 20);
}

TEST(HsicProperties, WideBandwidthLimit) {
  std::mt19937_64 rng(25);
  const DataMatrix x(oracle::random_matrix(rng, 40, 1));
  const DataMatrix y(x.values().array().square().matrix());
  EXPECT_LT(hsic(x, y, KernelConfig(1e6), KernelConfig(1.0)).statistic, 1e-6);
  EXPECT_GE(hsic(x, y, KernelConfig(1e6), KernelConfig(1.0)).statistic, 0.0);
}
