#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "causens/causal.hpp"
#include "oracles.hpp"

using namespace causens;

namespace {

PairedDataset cubic_pair(std::uint64_t seed, Eigen::Index n = 300) {
  SynthSpec spec;
  spec.n = n;
  return synth_anm_pair(spec, seed, "cubic");
}

PairedDataset swapped(const PairedDataset& p) {
  PairedDataset s = p;
  std::swap(s.x, s.y);
  s.ground_truth = p.ground_truth == Direction::XCausesY ? Direction::YCausesX : Direction::XCausesY;
  return s;
}

RegressorSpec ridge() {
  RegressorSpec s;
  s.kind = RegressorKind::KernelRidge;
  return s;
}

RegressorSpec forest(std::uint64_t seed, int trees = 30) {
  RegressorSpec s;
  s.seed = seed;
  s.forest.tree_count = trees;
  return s;
}

}  // namespace

TEST(Decisions, ThresholdsIncludeZero) {
  EXPECT_EQ(decide_c(-1e-3), Direction::XCausesY);
  EXPECT_EQ(decide_c(0.0), Direction::XCausesY);
  EXPECT_EQ(decide_c(1e-3), Direction::YCausesX);
  EXPECT_EQ(decide_cs(1e-3), Direction::XCausesY);
  EXPECT_EQ(decide_cs(0.0), Direction::XCausesY);
  EXPECT_EQ(decide_cs(-1e-3), Direction::YCausesX);
}

TEST(InferDirection, IdenticalVariablesScoreNearZero) {
  std::mt19937_64 rng(1);
  const DataMatrix x(oracle::random_matrix(rng, 100, 1));
  const PairedDataset pair{"same", x, x, Direction::Unknown, 1.0};
  const auto v = infer_direction(pair, ridge());
  // Both directions are literally the same computation.
  EXPECT_EQ(v.score_c, 0.0);
  EXPECT_EQ(v.score_cs, 0.0);
  const auto rf = infer_direction(pair, forest(3));
  EXPECT_EQ(rf.score_c, 0.0);
  EXPECT_EQ(rf.score_cs, 0.0);
}

TEST(InferDirection, NearlyIdenticalVariablesAreUndecided) {
  std::mt19937_64 rng(2);
  const Matrix x = oracle::random_matrix(rng, 200, 1);
  const Matrix y = x + oracle::random_matrix(rng, 200, 1, 1e-3);
  const auto v = infer_direction({"near", DataMatrix(x), DataMatrix(y), Direction::Unknown, 1.0}, ridge());
  // Compare against the spread of scores on a clearly identifiable pair.
  const auto ref = infer_direction(cubic_pair(5), ridge());
  EXPECT_LE(std::abs(v.score_c), 0.1 * std::abs(ref.score_c));
}

TEST(InferDirection, CubicAnmRecovered) {
  int correct_c = 0;
  int correct_cs = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto pair = cubic_pair(100 + s);
    const auto v = infer_direction(pair, forest(s));
    correct_c += v.direction_c == pair.ground_truth;
    correct_cs += v.direction_cs == pair.ground_truth;
  }
  EXPECT_GE(correct_c, 16);
  EXPECT_GE(correct_cs, 16);
  EXPECT_GE(correct_cs, correct_c - 2);
}

TEST(InferDirection, SwapNegatesScoresExactly) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto pair = cubic_pair(200 + s, 150);
    for (const auto& spec : {ridge(), forest(s)}) {
      const auto a = infer_direction(pair, spec);
      const auto b = infer_direction(swapped(pair), spec);
      EXPECT_EQ(a.score_c, -b.score_c);
      EXPECT_EQ(a.score_cs, -b.score_cs);
      if (a.score_c != 0.0) {
        EXPECT_NE(a.direction_c, b.direction_c);
      }
    }
  }
}

TEST(InferDirection, ScoresRebuildFromComponents) {
  const auto v = infer_direction(cubic_pair(7), forest(7));
  EXPECT_EQ(v.score_c, v.hsic_forward.statistic - v.hsic_backward.statistic);
  EXPECT_EQ(v.score_cs, (v.sens_backward_y + v.sens_backward_r) - (v.sens_forward_x + v.sens_forward_r));
  EXPECT_GE(v.hsic_forward.statistic, 0.0);
  EXPECT_GE(v.sens_forward_x, 0.0);
  EXPECT_EQ(v.confidence_c(), std::abs(v.score_c));
  EXPECT_EQ(v.direction_c, decide_c(v.score_c));
  EXPECT_EQ(v.direction_cs, decide_cs(v.score_cs));
}

TEST(InferDirection, CsSignFlipsSensitivityOnly) {
  const auto pair = cubic_pair(8);
  CausalOptions flipped;
  flipped.cs_sign = -1;
  const auto a = infer_direction(pair, ridge());
  const auto b = infer_direction(pair, ridge(), flipped);
  EXPECT_EQ(a.score_c, b.score_c);
  EXPECT_EQ(a.score_cs, -b.score_cs);
}

TEST(InferDirection, DeterministicForFixedSeed) {
  const auto pair = cubic_pair(9);
  const auto a = infer_direction(pair, forest(42));
  const auto b = infer_direction(pair, forest(42));
  EXPECT_EQ(a.score_c, b.score_c);
  EXPECT_EQ(a.score_cs, b.score_cs);
}

TEST(InferDirection, ErrorKinds) {
  std::mt19937_64 rng(10);
  const DataMatrix x(oracle::random_matrix(rng, 50, 1));
  auto kind_of = [](const PairedDataset& p) {
    try {
      infer_direction(p, RegressorSpec{});
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::EmptyInput;  // sentinel: no throw
  };
  EXPECT_EQ(kind_of({"c", x, DataMatrix(Matrix::Constant(50, 1, 3.0)), Direction::Unknown, 1.0}),
            ErrorKind::DegeneratePair);
  EXPECT_EQ(kind_of({"c", DataMatrix(Matrix::Constant(50, 1, 3.0)), x, Direction::Unknown, 1.0}),
            ErrorKind::DegeneratePair);
  EXPECT_EQ(kind_of({"s", DataMatrix(oracle::random_matrix(rng, 5, 1)), DataMatrix(oracle::random_matrix(rng, 5, 1)),
                     Direction::Unknown, 1.0}),
            ErrorKind::InsufficientData);
  EXPECT_EQ(kind_of({"m", x, DataMatrix(oracle::random_matrix(rng, 49, 1)), Direction::Unknown, 1.0}),
            ErrorKind::ShapeMismatch);
  EXPECT_EQ(kind_of({"d", x, DataMatrix(oracle::random_matrix(rng, 50, 2)), Direction::Unknown, 1.0}),
            ErrorKind::DimensionError);
}

TEST(InferDirection, PerfectDeterministicFitIsHandled) {
  // A noiseless linear pair: after standardization the residuals are at
  // rounding level, and the scores must stay finite and negligible.
  Matrix x(60, 1);
  for (int i = 0; i < 60; ++i) x(i, 0) = i / 59.0;
  const Matrix y = 3.0 * x;
  const PairedDataset pair{"det", DataMatrix(x), DataMatrix(y), Direction::XCausesY, 1.0};
  RegressorSpec exact = forest(1, 1);
  exact.forest.bootstrap = false;
  exact.forest.min_leaf_size = 1;
  const auto v = infer_direction(pair, exact);
  EXPECT_LE(std::abs(v.score_c), 1e-12);
  EXPECT_TRUE(std::isfinite(v.score_cs));
  EXPECT_TRUE(std::isfinite(infer_direction(pair, ridge()).score_cs));
}
