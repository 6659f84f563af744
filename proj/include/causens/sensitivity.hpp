#pragma once

// Sensitivity maps of the HSIC statistic: the partial derivative of the
// empirical HSIC with respect to every entry of both data matrices, and the
// squared-derivative aggregates over samples and features.
//
// With L = H K_y H and SE kernel K_x,
//
//   dHSIC/dX_ij = -2 / (sigma_x^2 n^2) * sum_k L_ik (K_x)_ik (X_ij - X_kj).
//
// Bandwidths are constants here; the map does not include d/d sigma.

#include "causens/hsic.hpp"

namespace causens {

namespace detail {

// Gradient with respect to `a`, where `b` supplies the centered partner kernel.
inline Matrix hsic_gradient_first(const DataMatrix& a, const DataMatrix& b,
                                  const KernelConfig& cfg_a, const KernelConfig& cfg_b) {
  require_same_rows(a, b);
  require_rows(a, "hsic gradient");
  const Matrix ka = se_kernel_matrix(a, cfg_a).values;
  const Matrix lb = center(se_kernel_matrix(b, cfg_b)).values;
  const Eigen::Index n = a.rows();
  const double s = cfg_a.bandwidth();
  const double scale = -2.0 / (s * s * static_cast<double>(n) * static_cast<double>(n));

  // W = L o K is symmetric, so walk columns of W (contiguous in Eigen's layout).
  const Matrix w = (lb.array() * ka.array()).matrix();
  const Matrix& x = a.values();
  Matrix grad(n, a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = x(i, j);
      double acc = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) acc += w(k, i) * (xi - x(k, j));
      grad(i, j) = scale * acc;
    }
  }
  return grad;
}

}  // namespace detail

/// dHSIC(x, y)/dX_ij for every sample i and feature j of x.
inline Matrix hsic_gradient_x(const DataMatrix& x, const DataMatrix& y, const KernelConfig& cfg_x,
                              const KernelConfig& cfg_y) {
  return detail::hsic_gradient_first(x, y, cfg_x, cfg_y);
}

/// dHSIC(x, y)/dY_ij; same formula with the roles of x and y exchanged.
inline Matrix hsic_gradient_y(const DataMatrix& x, const DataMatrix& y, const KernelConfig& cfg_x,
                              const KernelConfig& cfg_y) {
  return detail::hsic_gradient_first(y, x, cfg_y, cfg_x);
}

/// Total sensitivity map S = [S^x, S^y] with its squared aggregates.
struct SensitivityMap {
  Matrix s_x;
  Matrix s_y;
  Vector per_sample;   // (1/(d_x+d_y)) sum_j S_ij^2
  Vector per_feature;  // (1/n) sum_i S_ij^2, x features first
  double total = 0.0;  // mean of all squared entries

  /// Mean squared entry of the S^x block alone.
  double total_x() const { return s_x.size() ? s_x.squaredNorm() / double(s_x.size()) : 0.0; }
  /// Mean squared entry of the S^y block alone.
  double total_y() const { return s_y.size() ? s_y.squaredNorm() / double(s_y.size()) : 0.0; }
};

inline SensitivityMap sensitivity_map(const DataMatrix& x, const DataMatrix& y,
                                      const KernelConfig& cfg_x, const KernelConfig& cfg_y) {
  SensitivityMap map;
  map.s_x = hsic_gradient_x(x, y, cfg_x, cfg_y);
  map.s_y = hsic_gradient_y(x, y, cfg_x, cfg_y);

  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols() + y.cols();
  Matrix joint(n, d);
  joint << map.s_x, map.s_y;
  const Matrix sq = joint.array().square().matrix();
  map.per_sample = sq.rowwise().sum() / static_cast<double>(d);
  map.per_feature = sq.colwise().sum().transpose() / static_cast<double>(n);
  map.total = sq.sum() / static_cast<double>(n * d);
  return map;
}

}  // namespace causens
