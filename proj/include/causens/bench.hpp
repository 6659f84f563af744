#pragma once

// Evaluation protocol: n_max sweep over repeated realizations, weighted
// ranked-decision ROC/PR curves, and per-n_max AUC summaries.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "causens/causal.hpp"

namespace causens {

struct BenchmarkRecord {
  std::string pair_id;
  int realization = 0;
  Eigen::Index n_used = 0;
  Eigen::Index n_max = 0;
  Direction ground_truth = Direction::Unknown;
  double weight = 1.0;
  DirectionVerdict verdict;
  bool correct_c = false;
  bool correct_cs = false;
  double wall_time_ms = 0.0;
  std::string error;  // empty on success

  bool ok() const noexcept { return error.empty(); }
};

enum class Criterion { C, Cs };

inline std::string_view to_string(Criterion c) { return c == Criterion::C ? "c" : "cs"; }

inline Criterion parse_criterion(std::string_view s) {
  if (s == "c") return Criterion::C;
  if (s == "cs") return Criterion::Cs;
  throw Error(ErrorKind::InvalidConfig, "criterion must be 'c' or 'cs'");
}

enum class Weighting { Uniform, PairWeights };

struct CurvePoint {
  double threshold = 0.0;
  double tpr = 0.0;
  double fpr = 0.0;
  double precision = 1.0;
  double recall = 0.0;
};

struct RankedCurve {
  std::vector<CurvePoint> points;
  double auc = 0.0;
  Weighting weighting = Weighting::PairWeights;
};

namespace detail {

// FNV-1a; stable across platforms, used to key seeds by pair id.
inline std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct RankedItem {
  double confidence;
  bool positive;
  double weight;
};

}  // namespace detail

/// Seed of the subsample drawn for (pair, n_max, realization).
inline std::uint64_t subsample_seed(std::uint64_t seed, std::string_view pair_id, Eigen::Index n_max,
                                    int realization) {
  return derive_seed(seed, {kStreamSubsample, detail::stable_hash(pair_id),
                            static_cast<std::uint64_t>(n_max), static_cast<std::uint64_t>(realization)});
}

/// Seed of the regressors fitted for (pair, n_max, realization).
inline std::uint64_t regression_seed(std::uint64_t seed, std::string_view pair_id, Eigen::Index n_max,
                                     int realization) {
  return derive_seed(seed, {kStreamRegression, detail::stable_hash(pair_id),
                            static_cast<std::uint64_t>(n_max), static_cast<std::uint64_t>(realization)});
}

/// Ranked-decision curve: each successful record is a positive (correct
/// direction) or negative instance, ranked by |score|; every count is scaled
/// by the record weight. Equal |score| values form one threshold step.
inline RankedCurve weighted_roc(const std::vector<BenchmarkRecord>& records, Criterion criterion,
                                Weighting weighting = Weighting::PairWeights) {
  std::vector<detail::RankedItem> items;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    const double score = criterion == Criterion::C ? r.verdict.score_c : r.verdict.score_cs;
    if (!std::isfinite(score)) continue;
    const bool positive = criterion == Criterion::C ? r.correct_c : r.correct_cs;
    items.push_back({std::abs(score), positive, weighting == Weighting::Uniform ? 1.0 : r.weight});
  }
  if (items.empty()) throw Error(ErrorKind::EmptyInput, "weighted_roc needs at least one scored record");

  // Total order so the accumulation sequence does not depend on record order.
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.positive != b.positive) return a.positive > b.positive;
    return a.weight < b.weight;
  });

  double total_pos = 0.0;
  double total_neg = 0.0;
  for (const auto& it : items) (it.positive ? total_pos : total_neg) += it.weight;
  auto rate = [](double count, double total) { return total > 0.0 ? count / total : 0.0; };

  RankedCurve curve;
  curve.weighting = weighting;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0, 1.0, 0.0});
  double tp = 0.0;
  double fp = 0.0;
  for (std::size_t i = 0; i < items.size();) {
    const double level = items[i].confidence;
    for (; i < items.size() && items[i].confidence == level; ++i) {
      (items[i].positive ? tp : fp) += items[i].weight;
    }
    const double tpr = rate(tp, total_pos);
    curve.points.push_back({level, tpr, rate(fp, total_neg), tp / (tp + fp), tpr});
  }
  // One class absent: close the curve at (1, 1).
  if (curve.points.back().tpr != 1.0 || curve.points.back().fpr != 1.0) {
    const double precision = curve.points.back().precision;
    curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0, precision, 1.0});
  }

  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = std::clamp(auc, 0.0, 1.0);
  return curve;
}

struct AucRow {
  Eigen::Index n_max = 0;
  Criterion criterion = Criterion::C;
  double mean_auc = 0.0;
  double std_auc = 0.0;  // sample standard deviation; 0 for one realization
  int realizations = 0;
};

/// AUC per (n_max, realization), then mean and std across realizations.
inline std::vector<AucRow> auc_vs_nmax_table(const std::vector<BenchmarkRecord>& records,
                                             Weighting weighting = Weighting::PairWeights) {
  std::map<std::pair<Eigen::Index, int>, std::vector<BenchmarkRecord>> cells;
  for (const auto& r : records) {
    if (r.ok()) cells[{r.n_max, r.realization}].push_back(r);
  }
  std::vector<AucRow> table;
  std::map<Eigen::Index, std::vector<double>> per_c;
  std::map<Eigen::Index, std::vector<double>> per_cs;
  for (const auto& [key, group] : cells) {
    per_c[key.first].push_back(weighted_roc(group, Criterion::C, weighting).auc);
    per_cs[key.first].push_back(weighted_roc(group, Criterion::Cs, weighting).auc);
  }
  auto summarize = [](Eigen::Index n_max, Criterion c, const std::vector<double>& v) {
    AucRow row{n_max, c, 0.0, 0.0, static_cast<int>(v.size())};
    for (double a : v) row.mean_auc += a;
    row.mean_auc /= static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double a : v) ss += (a - row.mean_auc) * (a - row.mean_auc);
      row.std_auc = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return row;
  };
  for (const auto& [n_max, v] : per_c) {
    table.push_back(summarize(n_max, Criterion::C, v));
    table.push_back(summarize(n_max, Criterion::Cs, per_cs.at(n_max)));
  }
  return table;
}

struct BenchmarkConfig {
  std::vector<Eigen::Index> n_max_list{50, 100, 200, 500, 2000};
  int realizations = 10;
  RegressorSpec regressor;
  CausalOptions causal;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

using RecordSink = std::function<void(const BenchmarkRecord&)>;

/// Runs every (pair, n_max, realization) cell. Output order is pair-major,
/// then n_max, then realization, independent of the thread count. Failures
/// become records carrying an error message. `sink` sees records as they
/// finish (serialized, completion order).
inline std::vector<BenchmarkRecord> run_benchmark(const std::vector<PairedDataset>& pairs,
                                                  const BenchmarkConfig& config,
                                                  const RecordSink& sink = {}) {
  if (config.realizations < 1) throw Error(ErrorKind::InvalidConfig, "realizations must be >= 1");
  for (auto n_max : config.n_max_list) {
    if (n_max < 2) throw Error(ErrorKind::InvalidConfig, "every n_max must be >= 2");
  }
  config.regressor.validate();

  struct Cell {
    std::size_t pair;
    Eigen::Index n_max;
    int realization;
  };
  std::vector<Cell> cells;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (auto n_max : config.n_max_list) {
      for (int r = 0; r < config.realizations; ++r) cells.push_back({p, n_max, r});
    }
  }

  std::vector<BenchmarkRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex sink_mutex;

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
      const Cell& cell = cells[i];
      const PairedDataset& pair = pairs[cell.pair];
      BenchmarkRecord rec;
      rec.pair_id = pair.id;
      rec.realization = cell.realization;
      rec.n_max = cell.n_max;
      rec.ground_truth = pair.ground_truth;
      rec.weight = pair.weight;
      const auto start = std::chrono::steady_clock::now();
      try {
        const PairedDataset sub =
            subsample(pair, cell.n_max, subsample_seed(config.seed, pair.id, cell.n_max, cell.realization));
        rec.n_used = sub.size();
        RegressorSpec spec = config.regressor;
        spec.seed = regression_seed(config.seed, pair.id, cell.n_max, cell.realization);
        rec.verdict = infer_direction(sub, spec, config.causal);
        rec.correct_c = rec.verdict.direction_c == pair.ground_truth;
        rec.correct_cs = rec.verdict.direction_cs == pair.ground_truth;
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      rec.wall_time_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
      out[i] = rec;
      if (sink) {
        std::lock_guard lock(sink_mutex);
        sink(out[i]);
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(cells.size(), 1)));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  return out;
}

/// Weighted fraction of successful records whose decision is correct.
inline double weighted_accuracy(const std::vector<BenchmarkRecord>& records, Criterion criterion) {
  double hit = 0.0;
  double total = 0.0;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    total += r.weight;
    if (criterion == Criterion::C ? r.correct_c : r.correct_cs) hit += r.weight;
  }
  if (total == 0.0) throw Error(ErrorKind::EmptyInput, "no successful records");
  return hit / total;
}

}  // namespace causens
