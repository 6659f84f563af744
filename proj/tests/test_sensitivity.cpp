#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "causens/sensitivity.hpp"
#include "oracles.hpp"

using namespace causens;

namespace {

struct Instance {
  Matrix x;
  Matrix y;
  double sx;
  double sy;
};

Instance make_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dx, Eigen::Index dy) {
  Instance in{oracle::random_matrix(rng, n, dx), oracle::random_matrix(rng, n, dy), 0, 0};
  in.y.col(0) += (2.0 * in.x.col(0).array()).sin().matrix();
  in.sx = oracle::median_pairwise_distance(in.x);
  in.sy = oracle::median_pairwise_distance(in.y);
  return in;
}

}  // namespace

TEST(HsicGradient, ConstantXGivesZero) {
  std::mt19937_64 rng(1);
  const DataMatrix x(Matrix::Constant(10, 1, -1.5));
  const DataMatrix y(oracle::random_matrix(rng, 10, 1));
  const Matrix g = hsic_gradient_x(x, y, KernelConfig(1.0), KernelConfig(1.0));
  EXPECT_EQ(g, Matrix::Zero(10, 1));
}

TEST(HsicGradient, ConstantYGivesZero) {
  std::mt19937_64 rng(2);
  const DataMatrix x(oracle::random_matrix(rng, 10, 1));
  const DataMatrix y(Matrix::Constant(10, 1, 4.0));
  EXPECT_EQ(hsic_gradient_x(x, y, KernelConfig(1.0), KernelConfig(1.0)), Matrix::Zero(10, 1));
  EXPECT_EQ(hsic_gradient_y(x, y, KernelConfig(1.0), KernelConfig(1.0)), Matrix::Zero(10, 1));
}

TEST(HsicGradient, XMatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const auto in = make_instance(rng, 10, 1, 1);
  const Matrix g = hsic_gradient_x(DataMatrix(in.x), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  const Matrix fd = oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 0);
  EXPECT_LT(oracle::gradient_error(g, fd), 1e-4);
}

TEST(HsicGradient, YMatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  const auto in = make_instance(rng, 8, 1, 1);
  const Matrix g = hsic_gradient_y(DataMatrix(in.x), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  const Matrix fd = oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 1);
  EXPECT_LT(oracle::gradient_error(g, fd), 1e-4);
}

TEST(HsicGradient, RoleSymmetry) {
  std::mt19937_64 rng(5);
  const auto in = make_instance(rng, 12, 2, 1);
  const DataMatrix x(in.x);
  const DataMatrix y(in.y);
  const KernelConfig cx(in.sx);
  const KernelConfig cy(in.sy);
  EXPECT_EQ(hsic_gradient_y(x, y, cx, cy), hsic_gradient_x(y, x, cy, cx));
}

TEST(HsicGradient, ShapeMismatch) {
  std::mt19937_64 rng(6);
  try {
    hsic_gradient_x(DataMatrix(oracle::random_matrix(rng, 4, 1)), DataMatrix(oracle::random_matrix(rng, 5, 1)),
                    KernelConfig(1.0), KernelConfig(1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(HsicGradient, RandomBatteryAgainstFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(4, 20);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = make_instance(rng, size(rng), 1 + trial % 2, 1 + (trial / 2) % 2);
    const DataMatrix x(in.x);
    const DataMatrix y(in.y);
    const KernelConfig cx(in.sx);
    const KernelConfig cy(in.sy);
    worst = std::max(worst, oracle::gradient_error(hsic_gradient_x(x, y, cx, cy),
                                                   oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 0)));
    worst = std::max(worst, oracle::gradient_error(hsic_gradient_y(x, y, cx, cy),
                                                   oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 1)));
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(HsicGradient, SumsToZeroOverSamples) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = make_instance(rng, 5 + trial, 2, 2);
    const DataMatrix x(in.x);
    const DataMatrix y(in.y);
    const Matrix gx = hsic_gradient_x(x, y, KernelConfig(in.sx), KernelConfig(in.sy));
    const Matrix gy = hsic_gradient_y(x, y, KernelConfig(in.sx), KernelConfig(in.sy));
    EXPECT_LE(gx.colwise().sum().cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE(gy.colwise().sum().cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SensitivityMap, BothConstantIsZero) {
  const DataMatrix x(Matrix::Constant(6, 1, 1.0));
  const DataMatrix y(Matrix::Constant(6, 1, 2.0));
  const auto map = sensitivity_map(x, y, KernelConfig(1.0), KernelConfig(1.0));
  EXPECT_EQ(map.total, 0.0);
  EXPECT_EQ(map.per_sample, Vector::Zero(6));
  EXPECT_EQ(map.per_feature, Vector::Zero(2));
}

TEST(SensitivityMap, AggregatesAgree) {
  std::mt19937_64 rng(9);
  const auto in = make_instance(rng, 15, 2, 1);
  const auto map = sensitivity_map(DataMatrix(in.x), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  ASSERT_EQ(map.per_sample.size(), 15);
  ASSERT_EQ(map.per_feature.size(), 3);
  const double sum_sq = map.s_x.squaredNorm() + map.s_y.squaredNorm();
  EXPECT_NEAR(15.0 * map.per_feature.sum(), sum_sq, 1e-15 + 1e-12 * sum_sq);
  EXPECT_NEAR(3.0 * map.per_sample.sum(), sum_sq, 1e-15 + 1e-12 * sum_sq);
  EXPECT_NEAR(map.total, sum_sq / 45.0, 1e-12 * sum_sq);
  EXPECT_TRUE((map.per_sample.array() >= 0).all());
  EXPECT_TRUE((map.per_feature.array() >= 0).all());
  EXPECT_NEAR(map.total_x(), map.s_x.squaredNorm() / 30.0, 1e-15);
  EXPECT_NEAR(map.total_y(), map.s_y.squaredNorm() / 15.0, 1e-15);
}

TEST(SensitivityMap, TotalMatchesFiniteDifferenceSquares) {
  std::mt19937_64 rng(10);
  const auto in = make_instance(rng, 15, 1, 1);
  const auto map = sensitivity_map(DataMatrix(in.x), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  const Matrix fx = oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 0);
  const Matrix fy = oracle::fd_gradient(in.x, in.y, in.sx, in.sy, 1);
  double brute = 0.0;
  for (Eigen::Index i = 0; i < 15; ++i) brute += fx(i, 0) * fx(i, 0) + fy(i, 0) * fy(i, 0);
  brute /= 30.0;
  EXPECT_NEAR(map.total, brute, 1e-3 * brute);
}

TEST(SensitivityMap, TranslationInvariant) {
  std::mt19937_64 rng(11);
  const auto in = make_instance(rng, 14, 1, 1);
  const auto a = sensitivity_map(DataMatrix(in.x), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  const Matrix shifted = in.x.array() + 10.0;
  const auto b = sensitivity_map(DataMatrix(shifted), DataMatrix(in.y), KernelConfig(in.sx), KernelConfig(in.sy));
  const double scale = a.s_x.cwiseAbs().maxCoeff();
  EXPECT_LE((a.s_x - b.s_x).cwiseAbs().maxCoeff(), 1e-10 * scale);
  EXPECT_LE((a.s_y - b.s_y).cwiseAbs().maxCoeff(), 1e-10 * a.s_y.cwiseAbs().maxCoeff());
}

TEST(SensitivityMap, ZeroWhenEitherVariableConstant) {
  std::mt19937_64 rng(12);
  const DataMatrix x(oracle::random_matrix(rng, 9, 1));
  const DataMatrix c(Matrix::Constant(9, 1, 0.3));
  EXPECT_EQ(sensitivity_map(x, c, KernelConfig(1.0), KernelConfig(1.0)).total, 0.0);
  EXPECT_EQ(sensitivity_map(c, x, KernelConfig(1.0), KernelConfig(1.0)).total, 0.0);
}
