#pragma once

#include <algorithm>

#include "causens/kernels.hpp"

namespace causens {

struct HsicValue {
  double statistic = 0.0;
  Eigen::Index n = 0;
  double sigma_x = 0.0;
  double sigma_y = 0.0;
};

namespace detail {

inline void require_same_rows(const DataMatrix& x, const DataMatrix& y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "sample counts differ: " + std::to_string(x.rows()) +
                                              " vs " + std::to_string(y.rows()));
  }
}

}  // namespace detail

/// Biased empirical HSIC, (1/n^2) Tr(H K_x H K_y), clamped at zero.
inline HsicValue hsic(const DataMatrix& x, const DataMatrix& y, const KernelConfig& cfg_x,
                      const KernelConfig& cfg_y) {
  detail::require_same_rows(x, y);
  detail::require_rows(x, "hsic");
  const KernelMatrix kx = center(se_kernel_matrix(x, cfg_x));
  const KernelMatrix ky = se_kernel_matrix(y, cfg_y);
  const double n = static_cast<double>(x.rows());
  // Tr(A B) for symmetric B is the sum of the Hadamard product.
  const double trace = (kx.values.array() * ky.values.array()).sum();
  return {std::max(0.0, trace / (n * n)), x.rows(), cfg_x.bandwidth(), cfg_y.bandwidth()};
}

/// HSIC with median-heuristic bandwidths for both arguments.
inline HsicValue hsic(const DataMatrix& x, const DataMatrix& y) {
  detail::require_same_rows(x, y);
  return hsic(x, y, median_heuristic_config(x), median_heuristic_config(y));
}

}  // namespace causens
