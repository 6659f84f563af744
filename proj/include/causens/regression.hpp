#pragma once

// Nonlinear regressors used for the forward and backward fits: a CART-style
// regression forest and squared-exponential kernel ridge regression.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "causens/kernels.hpp"
#include "causens/seeding.hpp"

namespace causens {

enum class RegressorKind { RandomForest, KernelRidge };

inline std::string_view to_string(RegressorKind k) {
  return k == RegressorKind::RandomForest ? "random_forest" : "kernel_ridge";
}

inline RegressorKind parse_regressor_kind(std::string_view s) {
  if (s == "random_forest" || s == "rf") return RegressorKind::RandomForest;
  if (s == "kernel_ridge" || s == "krr") return RegressorKind::KernelRidge;
  throw Error(ErrorKind::InvalidConfig, "unknown regressor kind '" + std::string(s) + "'");
}

struct ForestParams {
  int tree_count = 100;
  int max_depth = -1;  // negative: unlimited
  int min_leaf_size = 5;
  int features_per_split = 0;  // 0: all features
  bool bootstrap = true;        // false: every tree sees all rows once
};

struct RidgeParams {
  double lambda = 1e-3;  // penalty on the (1/n)-scaled loss, i.e. solves (K + n*lambda I) a = y
  double bandwidth = 0.0;  // 0: median heuristic on the inputs
};

struct RegressorSpec {
  RegressorKind kind = RegressorKind::RandomForest;
  ForestParams forest;
  RidgeParams ridge;
  std::uint64_t seed = 0;

  void validate() const {
    if (forest.tree_count < 1) throw Error(ErrorKind::InvalidConfig, "tree_count must be >= 1");
    if (forest.min_leaf_size < 1) throw Error(ErrorKind::InvalidConfig, "min_leaf_size must be >= 1");
    if (!(ridge.lambda > 0.0) || !std::isfinite(ridge.lambda)) {
      throw Error(ErrorKind::InvalidConfig, "ridge lambda must be positive and finite");
    }
    if (ridge.bandwidth < 0.0 || !std::isfinite(ridge.bandwidth)) {
      throw Error(ErrorKind::InvalidConfig, "ridge bandwidth must be >= 0 (0 selects the median rule)");
    }
  }
};

struct RegressionFit {
  Vector predictions;
  Vector residuals;  // targets - predictions
  RegressorSpec spec;
};

namespace detail {

inline void check_regression_inputs(const DataMatrix& inputs, const Vector& targets) {
  if (inputs.rows() != targets.size()) {
    throw Error(ErrorKind::ShapeMismatch, "inputs and targets have different lengths");
  }
  if (inputs.rows() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "regression needs at least 2 samples, got " + std::to_string(inputs.rows()));
  }
  if (!targets.allFinite()) throw Error(ErrorKind::InvalidData, "targets contain NaN or Inf");
}

// Mean computed as first + mean(v - first): exact for constant input and
// always clamped into [min, max] of the values.
template <typename Range, typename Get>
double shifted_mean(const Range& items, Get get) {
  auto it = std::begin(items);
  const double base = get(*it);
  double lo = base, hi = base, acc = 0.0;
  std::size_t count = 0;
  for (const auto& item : items) {
    const double v = get(item);
    acc += v - base;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    ++count;
  }
  return std::clamp(base + acc / static_cast<double>(count), lo, hi);
}

}  // namespace detail

/// Single regression tree stored as a flat node array.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  /// Grows the tree on the rows listed in `sample` (duplicates allowed).
  void fit(const Matrix& x, const Vector& y, std::vector<int> sample, const ForestParams& params,
           std::mt19937_64& rng) {
    nodes_.clear();
    params_ = params;
    build(x, y, sample, 0, rng);
  }

  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    int at = 0;
    while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
      const Node& node = nodes_[static_cast<std::size_t>(at)];
      at = row(node.feature) <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(at)].value;
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -std::numeric_limits<double>::infinity();
  };

  int build(const Matrix& x, const Vector& y, std::vector<int>& sample, int depth,
            std::mt19937_64& rng) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[static_cast<std::size_t>(id)].value =
        detail::shifted_mean(sample, [&](int i) { return y(i); });

    const auto m = static_cast<int>(sample.size());
    const bool depth_left = params_.max_depth < 0 || depth < params_.max_depth;
    if (!depth_left || m < 2 * params_.min_leaf_size) return id;

    const Split split = best_split(x, y, sample, rng);
    if (split.feature < 0) return id;

    std::vector<int> left;
    std::vector<int> right;
    left.reserve(sample.size());
    right.reserve(sample.size());
    for (int i : sample) (x(i, split.feature) <= split.threshold ? left : right).push_back(i);
    std::vector<int>().swap(sample);

    const int l = build(x, y, left, depth + 1, rng);
    const int r = build(x, y, right, depth + 1, rng);
    Node& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split best_split(const Matrix& x, const Vector& y, const std::vector<int>& sample,
                   std::mt19937_64& rng) const {
    const int d = static_cast<int>(x.cols());
    std::vector<int> features(static_cast<std::size_t>(d));
    std::iota(features.begin(), features.end(), 0);
    int tried = d;
    if (params_.features_per_split > 0 && params_.features_per_split < d) {
      std::shuffle(features.begin(), features.end(), rng);
      tried = params_.features_per_split;
    }

    const auto m = sample.size();
    const auto min_leaf = static_cast<std::size_t>(params_.min_leaf_size);
    const double mu = detail::shifted_mean(sample, [&](int i) { return y(i); });
    double node_sse = 0.0;
    for (int i : sample) node_sse += (y(i) - mu) * (y(i) - mu);
    Split best;
    if (!(node_sse > 0.0)) return best;

    std::vector<int> order(sample);
    for (int f = 0; f < tried; ++f) {
      const int feat = features[static_cast<std::size_t>(f)];
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double xa = x(a, feat);
        const double xb = x(b, feat);
        return xa < xb || (xa == xb && a < b);
      });
      // On targets centered at the node mean, the squared-error reduction of a
      // split is S_l^2/n_l + S_r^2/n_r.
      double total = 0.0;
      for (int i : order) total += y(i) - mu;
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < m; ++k) {
        left_sum += y(order[k]) - mu;
        const double xk = x(order[k], feat);
        const double xnext = x(order[k + 1], feat);
        if (xk == xnext) continue;
        const std::size_t nl = k + 1;
        const std::size_t nr = m - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double right_sum = total - left_sum;
        const double score = left_sum * left_sum / double(nl) + right_sum * right_sum / double(nr);
        if (score > best.score) {
          best.score = score;
          best.feature = feat;
          best.threshold = 0.5 * (xk + xnext);
          // Midpoint can round to xnext for adjacent doubles.
          if (!(best.threshold < xnext)) best.threshold = xk;
        }
      }
    }
    if (best.feature >= 0 && !(best.score > 1e-12 * node_sse)) best.feature = -1;
    return best;
  }

  std::vector<Node> nodes_;
  ForestParams params_;
};

/// Bagged regression trees with per-tree seeds derived from the forest seed,
/// so the fitted model does not depend on the order in which trees are grown.
class RandomForest {
 public:
  void fit(const DataMatrix& inputs, const Vector& targets, const ForestParams& params,
           std::uint64_t seed) {
    detail::check_regression_inputs(inputs, targets);
    const Matrix& x = inputs.values();
    const auto n = static_cast<int>(x.rows());
    trees_.assign(static_cast<std::size_t>(params.tree_count), RegressionTree{});
    for (int t = 0; t < params.tree_count; ++t) {
      std::mt19937_64 rng(derive_seed(seed, {kStreamTree, static_cast<std::uint64_t>(t)}));
      std::uniform_int_distribution<int> pick(0, n - 1);
      std::vector<int> sample(static_cast<std::size_t>(n));
      if (params.bootstrap) {
        for (auto& s : sample) s = pick(rng);
      } else {
        std::iota(sample.begin(), sample.end(), 0);
      }
      trees_[static_cast<std::size_t>(t)].fit(x, targets, std::move(sample), params, rng);
    }
  }

  Vector predict(const DataMatrix& inputs) const {
    const Matrix& x = inputs.values();
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      out(i) = detail::shifted_mean(trees_, [&](const RegressionTree& t) { return t.predict(x.row(i)); });
    }
    return out;
  }

  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

 private:
  std::vector<RegressionTree> trees_;
};

/// SE-kernel ridge regression on mean-centered targets.
class KernelRidge {
 public:
  void fit(const DataMatrix& inputs, const Vector& targets, const RidgeParams& params) {
    detail::check_regression_inputs(inputs, targets);
    train_ = inputs;
    mean_ = detail::shifted_mean(targets, [](double v) { return v; });
    double sigma = params.bandwidth;
    if (sigma == 0.0) {
      // Constant inputs carry no information; the kernel is then all ones for any sigma.
      try {
        sigma = median_heuristic_bandwidth(inputs);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateData) throw;
        sigma = 1.0;
      }
    }
    config_ = KernelConfig(sigma);
    const auto n = static_cast<double>(inputs.rows());
    Matrix k = se_kernel_matrix(inputs, *config_).values;
    k.diagonal().array() += n * params.lambda;
    const Vector centered = targets.array() - mean_;
    alpha_ = k.llt().solve(centered);
  }

  Vector predict(const DataMatrix& inputs) const {
    const Matrix& a = inputs.values();
    const Matrix& b = train_.values();
    const double inv_two_s2 = 1.0 / (2.0 * config_->bandwidth() * config_->bandwidth());
    Vector out(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < b.rows(); ++k) {
        acc += alpha_(k) * std::exp(-inv_two_s2 * (a.row(i) - b.row(k)).squaredNorm());
      }
      out(i) = mean_ + acc;
    }
    return out;
  }

  double bandwidth() const { return config_->bandwidth(); }

 private:
  DataMatrix train_;
  double mean_ = 0.0;
  std::optional<KernelConfig> config_;
  Vector alpha_;
};

/// In-sample fit: train on (inputs, targets) and predict the same rows.
inline RegressionFit fit_predict(const DataMatrix& inputs, const Vector& targets,
                                 const RegressorSpec& spec) {
  spec.validate();
  detail::check_regression_inputs(inputs, targets);
  RegressionFit fit;
  fit.spec = spec;
  if (spec.kind == RegressorKind::RandomForest) {
    RandomForest forest;
    forest.fit(inputs, targets, spec.forest, spec.seed);
    fit.predictions = forest.predict(inputs);
  } else {
    KernelRidge ridge;
    ridge.fit(inputs, targets, spec.ridge);
    fit.predictions = ridge.predict(inputs);
  }
  fit.residuals = targets - fit.predictions;
  return fit;
}

}  // namespace causens
