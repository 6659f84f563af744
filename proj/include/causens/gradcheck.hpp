#pragma once

// Self-check of the analytic HSIC gradients against central finite
// differences of the statistic itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "causens/seeding.hpp"
#include "causens/sensitivity.hpp"

namespace causens {

struct GradcheckOptions {
  std::vector<Eigen::Index> sizes{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<Eigen::Index> dims{1, 2};
  int seeds = 5;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
  double abs_floor = 1e-10;
};

struct GradcheckReport {
  int instances = 0;
  int failures = 0;
  double worst_error = 0.0;
  Eigen::Index worst_n = 0;

  bool passed() const noexcept { return failures == 0; }
};

/// Central differences of hsic() w.r.t. every entry of `which` (0: x, 1: y),
/// step h = 1e-5 * max(1, |entry|).
inline Matrix finite_difference_gradient(const DataMatrix& x, const DataMatrix& y, const KernelConfig& cfg_x,
                                         const KernelConfig& cfg_y, int which) {
  const Matrix& base = which == 0 ? x.values() : y.values();
  Matrix grad(base.rows(), base.cols());
  for (Eigen::Index i = 0; i < base.rows(); ++i) {
    for (Eigen::Index j = 0; j < base.cols(); ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(base(i, j)));
      Matrix plus = base;
      Matrix minus = base;
      plus(i, j) += h;
      minus(i, j) -= h;
      const double fp = which == 0 ? hsic(DataMatrix(plus), y, cfg_x, cfg_y).statistic
                                   : hsic(x, DataMatrix(plus), cfg_x, cfg_y).statistic;
      const double fm = which == 0 ? hsic(DataMatrix(minus), y, cfg_x, cfg_y).statistic
                                   : hsic(x, DataMatrix(minus), cfg_x, cfg_y).statistic;
      grad(i, j) = (fp - fm) / ((plus(i, j) - minus(i, j)));
    }
  }
  return grad;
}

/// max |a - b| / max(max |b|, abs_floor): the error relative to the
/// gradient's overall scale. Entry-wise ratios are not used because entries
/// near zero sit below the finite-difference truncation error.
inline double max_relative_error(const Matrix& analytic, const Matrix& numeric, double abs_floor) {
  if (analytic.hasNaN() || numeric.hasNaN()) return std::numeric_limits<double>::quiet_NaN();
  const double scale = std::max(numeric.cwiseAbs().maxCoeff(), abs_floor);
  return (analytic - numeric).cwiseAbs().maxCoeff() / scale;
}

/// Standard-normal instances for every (n, d_x, d_y, seed) combination, with
/// median-heuristic bandwidths (falling back to 1 for identical rows).
inline GradcheckReport run_gradcheck(const GradcheckOptions& opt) {
  GradcheckReport report;
  auto bandwidth = [](const DataMatrix& m) {
    try {
      return median_heuristic_config(m);
    } catch (const Error&) {
      return KernelConfig(1.0);
    }
  };
  for (auto n : opt.sizes) {
    for (auto dx : opt.dims) {
      for (auto dy : opt.dims) {
        for (int s = 0; s < opt.seeds; ++s) {
          std::mt19937_64 rng(derive_seed(opt.seed, {std::uint64_t(n), std::uint64_t(dx), std::uint64_t(dy),
                                                     std::uint64_t(s)}));
          std::normal_distribution<double> normal;
          Matrix xm(n, dx);
          Matrix ym(n, dy);
          for (Eigen::Index k = 0; k < xm.size(); ++k) xm.data()[k] = normal(rng);
          for (Eigen::Index k = 0; k < ym.size(); ++k) ym.data()[k] = normal(rng);
          // Mild dependence so the gradients are not dominated by noise.
          for (Eigen::Index i = 0; i < n; ++i) ym(i, 0) += std::sin(2.0 * xm(i, 0));
          const DataMatrix x(xm);
          const DataMatrix y(ym);
          const KernelConfig cx = bandwidth(x);
          const KernelConfig cy = bandwidth(y);
          const double ex = max_relative_error(hsic_gradient_x(x, y, cx, cy),
                                               finite_difference_gradient(x, y, cx, cy, 0), opt.abs_floor);
          const double ey = max_relative_error(hsic_gradient_y(x, y, cx, cy),
                                               finite_difference_gradient(x, y, cx, cy, 1), opt.abs_floor);
          const double err = std::max(ex, ey);
          ++report.instances;
          if (!(err < opt.tolerance)) ++report.failures;
          if (err > report.worst_error || std::isnan(err)) {
            report.worst_error = err;
            report.worst_n = n;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace causens
