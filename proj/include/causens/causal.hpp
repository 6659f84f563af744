#pragma once

// Bivariate direction decision from forward (x -> y) and backward (y -> x)
// regression residuals: the HSIC-difference score and the HSIC-sensitivity
// score.

#include <cmath>
#include <optional>

#include "causens/dataset.hpp"
#include "causens/hsic.hpp"
#include "causens/regression.hpp"
#include "causens/sensitivity.hpp"

namespace causens {

struct CausalOptions {
  Eigen::Index min_samples = 10;
  /// z-score x and y before fitting; keeps the sensitivity terms of both
  /// directions in comparable units.
  bool standardize = true;
  /// Multiplies the sensitivity score; +1 is the default orientation
  /// (larger backward sensitivity means x -> y).
  int cs_sign = 1;
};

struct DirectionVerdict {
  double score_c = 0.0;
  double score_cs = 0.0;
  Direction direction_c = Direction::XCausesY;
  Direction direction_cs = Direction::XCausesY;
  HsicValue hsic_forward;   // HSIC(x, r_f)
  HsicValue hsic_backward;  // HSIC(y, r_b)
  double sens_forward_x = 0.0;
  double sens_forward_r = 0.0;
  double sens_backward_y = 0.0;
  double sens_backward_r = 0.0;

  double confidence_c() const { return std::abs(score_c); }
  double confidence_cs() const { return std::abs(score_cs); }
};

/// x -> y iff score_c <= 0 (forward residuals at least as independent).
inline Direction decide_c(double score_c) {
  return score_c <= 0.0 ? Direction::XCausesY : Direction::YCausesX;
}

/// x -> y iff score_cs >= 0 (backward fit at least as sensitive).
inline Direction decide_cs(double score_cs) {
  return score_cs >= 0.0 ? Direction::XCausesY : Direction::YCausesX;
}

namespace detail {

inline bool is_constant(const DataMatrix& m) {
  return (m.values().rowwise() - m.values().row(0)).cwiseAbs().maxCoeff() == 0.0;
}

inline DataMatrix zscore(const DataMatrix& m) {
  const Eigen::RowVectorXd mean = m.values().colwise().mean();
  Matrix c = m.values().rowwise() - mean;
  const double n = static_cast<double>(m.rows());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double sd = std::sqrt(c.col(j).squaredNorm() / n);
    if (sd > 0.0) c.col(j) /= sd;
  }
  return DataMatrix(std::move(c));
}

// Median heuristic, except that an all-constant argument (e.g. a perfect fit
// leaving zero residuals) gets sigma = 1: its kernel is constant for any sigma,
// so HSIC and every gradient entry are zero regardless.
inline KernelConfig bandwidth_or_unit(const DataMatrix& m) {
  if (is_constant(m)) return KernelConfig(1.0);
  return median_heuristic_config(m);
}

struct DirectionalTerms {
  HsicValue hsic;
  double sens_input = 0.0;
  double sens_residual = 0.0;
};

inline DirectionalTerms directional_terms(const DataMatrix& input, const DataMatrix& residual) {
  const KernelConfig cfg_in = bandwidth_or_unit(input);
  const KernelConfig cfg_res = bandwidth_or_unit(residual);
  DirectionalTerms t;
  t.hsic = hsic(input, residual, cfg_in, cfg_res);
  const SensitivityMap map = sensitivity_map(input, residual, cfg_in, cfg_res);
  t.sens_input = map.total_x();
  t.sens_residual = map.total_y();
  return t;
}

}  // namespace detail

/// Fits both directions and scores them. Both fits use spec.seed, so
/// swapping x and y negates both scores exactly.
inline DirectionVerdict infer_direction(const PairedDataset& pair, const RegressorSpec& spec,
                                        const CausalOptions& options = {}) {
  if (pair.x.rows() != pair.y.rows()) {
    throw Error(ErrorKind::ShapeMismatch, pair.id + ": x and y have different lengths");
  }
  if (pair.x.cols() != 1 || pair.y.cols() != 1) {
    throw Error(ErrorKind::DimensionError, pair.id + ": only one-dimensional pairs are supported");
  }
  const Eigen::Index floor = std::max<Eigen::Index>(options.min_samples, 2);
  if (pair.size() < floor) {
    throw Error(ErrorKind::InsufficientData, pair.id + ": " + std::to_string(pair.size()) +
                                                 " samples, need at least " + std::to_string(floor));
  }
  if (detail::is_constant(pair.x) || detail::is_constant(pair.y)) {
    throw Error(ErrorKind::DegeneratePair, pair.id + ": degenerate pair, a variable is constant");
  }

  const DataMatrix x = options.standardize ? detail::zscore(pair.x) : pair.x;
  const DataMatrix y = options.standardize ? detail::zscore(pair.y) : pair.y;

  const RegressionFit forward = fit_predict(x, y.col0(), spec);
  const RegressionFit backward = fit_predict(y, x.col0(), spec);
  const DataMatrix r_f = DataMatrix::column(forward.residuals);
  const DataMatrix r_b = DataMatrix::column(backward.residuals);

  const auto f = detail::directional_terms(x, r_f);
  const auto b = detail::directional_terms(y, r_b);

  DirectionVerdict v;
  v.hsic_forward = f.hsic;
  v.hsic_backward = b.hsic;
  v.sens_forward_x = f.sens_input;
  v.sens_forward_r = f.sens_residual;
  v.sens_backward_y = b.sens_input;
  v.sens_backward_r = b.sens_residual;
  v.score_c = v.hsic_forward.statistic - v.hsic_backward.statistic;
  v.score_cs = (v.sens_backward_y + v.sens_backward_r) - (v.sens_forward_x + v.sens_forward_r);
  if (options.cs_sign < 0) v.score_cs = -v.score_cs;
  v.direction_c = decide_c(v.score_c);
  v.direction_cs = decide_cs(v.score_cs);
  return v;
}

}  // namespace causens
