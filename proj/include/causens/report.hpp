#pragma once

// Results persistence: record CSV (with an embedded run-config comment line),
// per-record timings, curve CSV and the JSON summary.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "causens/bench.hpp"

namespace causens {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr const char* kRecordColumns =
    "pair_id,realization,n_max,n_used,ground_truth,weight,score_c,score_cs,direction_c,direction_cs,"
    "correct_c,correct_cs,hsic_forward,hsic_backward,sens_forward_x,sens_forward_r,sens_backward_y,"
    "sens_backward_r,error";

namespace detail {

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += (c == '\n' || c == '\r') ? ' ' : c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

inline double parse_csv_double(const std::string& s, std::size_t line_no) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw Error(ErrorKind::ParseError, "records csv line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace detail

inline void write_records_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records,
                              const nlohmann::json& run_config) {
  out << "# config: " << run_config.dump() << '\n';
  out << kRecordColumns << '\n';
  for (const auto& r : records) {
    const auto& v = r.verdict;
    out << detail::csv_quote(r.pair_id) << ',' << r.realization << ',' << r.n_max << ',' << r.n_used << ','
        << to_string(r.ground_truth) << ',' << format_double(r.weight) << ',';
    if (r.ok()) {
      out << format_double(v.score_c) << ',' << format_double(v.score_cs) << ',' << to_string(v.direction_c)
          << ',' << to_string(v.direction_cs) << ',' << int(r.correct_c) << ',' << int(r.correct_cs) << ','
          << format_double(v.hsic_forward.statistic) << ',' << format_double(v.hsic_backward.statistic) << ','
          << format_double(v.sens_forward_x) << ',' << format_double(v.sens_forward_r) << ','
          << format_double(v.sens_backward_y) << ',' << format_double(v.sens_backward_r) << ",";
    } else {
      out << ",,,,,,,,,,,,";
    }
    out << detail::csv_quote(r.error) << '\n';
  }
}

/// Reads a record CSV back. Comment lines starting with '#' are skipped.
/// Timing is not part of the record file and reads back as 0.
inline std::vector<BenchmarkRecord> read_records_csv(std::istream& in) {
  std::vector<BenchmarkRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::csv_split(line);
    if (header.empty()) {
      header = std::move(fields);
      if (header != detail::csv_split(kRecordColumns)) {
        throw Error(ErrorKind::ParseError, "records csv line " + std::to_string(line_no) + ": unexpected header");
      }
      continue;
    }
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::ParseError, "records csv line " + std::to_string(line_no) + ": expected " +
                                             std::to_string(header.size()) + " fields");
    }
    auto num = [&](std::size_t i) { return detail::parse_csv_double(fields[i], line_no); };
    BenchmarkRecord r;
    r.pair_id = fields[0];
    r.realization = static_cast<int>(num(1));
    r.n_max = static_cast<Eigen::Index>(num(2));
    r.n_used = static_cast<Eigen::Index>(num(3));
    r.ground_truth = parse_direction(fields[4]);
    r.weight = num(5);
    r.error = fields[18];
    if (r.ok()) {
      auto& v = r.verdict;
      v.score_c = num(6);
      v.score_cs = num(7);
      v.direction_c = parse_direction(fields[8]);
      v.direction_cs = parse_direction(fields[9]);
      r.correct_c = fields[10] == "1";
      r.correct_cs = fields[11] == "1";
      v.hsic_forward.statistic = num(12);
      v.hsic_backward.statistic = num(13);
      v.sens_forward_x = num(14);
      v.sens_forward_r = num(15);
      v.sens_backward_y = num(16);
      v.sens_backward_r = num(17);
      v.hsic_forward.n = v.hsic_backward.n = r.n_used;
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_timings_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << "pair_id,realization,n_max,wall_time_ms\n";
  for (const auto& r : records) {
    out << detail::csv_quote(r.pair_id) << ',' << r.realization << ',' << r.n_max << ','
        << format_double(r.wall_time_ms) << '\n';
  }
}

/// One block of rows per (criterion, n_max), realizations pooled.
inline void write_curves_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records,
                             const nlohmann::json& run_config, Weighting weighting = Weighting::PairWeights) {
  out << "# config: " << run_config.dump() << '\n';
  out << "criterion,n_max,threshold,fpr,tpr,precision,recall\n";
  std::map<Eigen::Index, std::vector<BenchmarkRecord>> by_nmax;
  for (const auto& r : records) {
    if (r.ok()) by_nmax[r.n_max].push_back(r);
  }
  for (Criterion c : {Criterion::C, Criterion::Cs}) {
    for (const auto& [n_max, group] : by_nmax) {
      const RankedCurve curve = weighted_roc(group, c, weighting);
      for (const auto& p : curve.points) {
        out << to_string(c) << ',' << n_max << ',' << format_double(p.threshold) << ',' << format_double(p.fpr)
            << ',' << format_double(p.tpr) << ',' << format_double(p.precision) << ','
            << format_double(p.recall) << '\n';
      }
    }
  }
}

inline nlohmann::json summary_json(const std::vector<BenchmarkRecord>& records, const nlohmann::json& run_config,
                                   Weighting weighting = Weighting::PairWeights) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["config"] = run_config;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    if (std::find(ids.begin(), ids.end(), r.pair_id) == ids.end()) ids.push_back(r.pair_id);
  }
  j["pair_ids"] = ids;
  j["records"] = records.size();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : records) {
    if (!r.ok()) {
      failures.push_back({{"pair_id", r.pair_id}, {"n_max", r.n_max}, {"realization", r.realization},
                          {"error", r.error}});
    }
  }
  j["failed_records"] = failures;
  nlohmann::json table = nlohmann::json::array();
  bool any_ok = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.ok(); });
  if (any_ok) {
    for (const auto& row : auc_vs_nmax_table(records, weighting)) {
      table.push_back({{"n_max", row.n_max},
                       {"criterion", to_string(row.criterion)},
                       {"mean_auc", row.mean_auc},
                       {"std_auc", row.std_auc},
                       {"realizations", row.realizations}});
    }
    j["weighted_accuracy"] = {{"c", weighted_accuracy(records, Criterion::C)},
                              {"cs", weighted_accuracy(records, Criterion::Cs)}};
  }
  j["auc_table"] = table;
  return j;
}

}  // namespace causens
