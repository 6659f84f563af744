#pragma once

// Squared-exponential kernel matrices, feature-space centering and the
// median-heuristic bandwidth rule.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "causens/error.hpp"

namespace causens {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// n x d sample matrix: rows are samples, columns are features. Entries are
/// guaranteed finite; the row-count requirement is enforced by the operations.
class DataMatrix {
 public:
  DataMatrix() = default;

  explicit DataMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.allFinite()) {
      throw Error(ErrorKind::InvalidData, "data matrix contains NaN or Inf");
    }
  }

  static DataMatrix column(std::span<const double> v) {
    Matrix m(static_cast<Eigen::Index>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
    return DataMatrix(std::move(m));
  }

  static DataMatrix column(const Vector& v) { return DataMatrix(Matrix(v)); }

  Eigen::Index rows() const noexcept { return values_.rows(); }
  Eigen::Index cols() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

  /// First column as a vector (the 1-D pair case).
  Vector col0() const { return values_.col(0); }

  bool operator==(const DataMatrix& other) const {
    return values_.rows() == other.values_.rows() && values_.cols() == other.values_.cols() &&
           values_ == other.values_;
  }

 private:
  Matrix values_;
};

enum class KernelFamily { SquaredExponential };

/// Bandwidth and family for one variable's kernel.
class KernelConfig {
 public:
  explicit KernelConfig(double bandwidth,
                        KernelFamily family = KernelFamily::SquaredExponential)
      : bandwidth_(bandwidth), family_(family) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
      throw Error(ErrorKind::InvalidConfig,
                  "kernel bandwidth must be positive and finite, got " + std::to_string(bandwidth));
    }
  }

  double bandwidth() const noexcept { return bandwidth_; }
  KernelFamily family() const noexcept { return family_; }

 private:
  double bandwidth_;
  KernelFamily family_;
};

struct KernelMatrix {
  Matrix values;
  bool centered = false;
};

namespace detail {

inline void require_rows(const DataMatrix& data, const char* what) {
  if (data.rows() < 2) {
    throw Error(ErrorKind::InsufficientData,
                std::string(what) + " needs at least 2 samples, got " + std::to_string(data.rows()));
  }
}

inline Matrix squared_distances(const Matrix& x) {
  const Eigen::Index n = x.rows();
  Matrix d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d2(i, i) = 0.0;
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const double v = (x.row(i) - x.row(k)).squaredNorm();
      d2(i, k) = v;
      d2(k, i) = v;
    }
  }
  return d2;
}

}  // namespace detail

/// K_ik = exp(-||x_i - x_k||^2 / (2 sigma^2)). Exactly symmetric, unit diagonal.
inline KernelMatrix se_kernel_matrix(const DataMatrix& data, const KernelConfig& config) {
  detail::require_rows(data, "se_kernel_matrix");
  const double inv_two_s2 = 1.0 / (2.0 * config.bandwidth() * config.bandwidth());
  Matrix k = detail::squared_distances(data.values());
  k = (-inv_two_s2 * k.array()).exp().matrix();
  return {std::move(k), false};
}

/// H K H with H = I - (1/n) 11^T, without materializing H: subtract row and
/// column means and add back the grand mean.
inline KernelMatrix center(const KernelMatrix& k) {
  const Matrix& m = k.values;
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "center expects a square matrix");
  }
  const Vector row_mean = m.rowwise().mean();
  const Eigen::RowVectorXd col_mean = m.colwise().mean();
  const double grand = m.mean();
  Matrix out = m;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += grand;
  return {std::move(out), true};
}

/// Median of the n(n-1)/2 pairwise Euclidean distances between rows. A zero
/// median (heavy ties) falls back to the smallest nonzero distance.
inline double median_heuristic_bandwidth(const DataMatrix& data) {
  detail::require_rows(data, "median_heuristic_bandwidth");
  const Matrix& x = data.values();
  const Eigen::Index n = x.rows();
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) dist.push_back((x.row(i) - x.row(k)).norm());
  }
  double smallest_nonzero = 0.0;
  for (double d : dist) {
    if (d > 0.0 && (smallest_nonzero == 0.0 || d < smallest_nonzero)) smallest_nonzero = d;
  }
  if (smallest_nonzero == 0.0) {
    throw Error(ErrorKind::DegenerateData, "all rows are identical; no bandwidth can be chosen");
  }

  const std::size_t m = dist.size();
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>(m / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  double median = *mid;
  if (m % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), mid);
    median = 0.5 * (lower + median);
  }
  return median > 0.0 ? median : smallest_nonzero;
}

inline KernelConfig median_heuristic_config(const DataMatrix& data) {
  return KernelConfig(median_heuristic_bandwidth(data));
}

}  // namespace causens
