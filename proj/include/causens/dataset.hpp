#pragma once

// Cause-effect pair ingestion (pairNNNN.txt + pairmeta.txt conventions),
// subsampling and synthetic additive-noise pair generation.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "causens/kernels.hpp"
#include "causens/seeding.hpp"

namespace causens {

enum class Direction { XCausesY, YCausesX, Unknown };

inline std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::XCausesY: return "x_causes_y";
    case Direction::YCausesX: return "y_causes_x";
    case Direction::Unknown: return "unknown";
  }
  return "unknown";
}

inline Direction parse_direction(std::string_view s) {
  if (s == "x_causes_y") return Direction::XCausesY;
  if (s == "y_causes_x") return Direction::YCausesX;
  if (s == "unknown") return Direction::Unknown;
  throw Error(ErrorKind::ParseError, "unknown direction tag '" + std::string(s) + "'");
}

struct PairedDataset {
  std::string id;
  DataMatrix x;
  DataMatrix y;
  Direction ground_truth = Direction::Unknown;
  double weight = 1.0;

  Eigen::Index size() const noexcept { return x.rows(); }

  bool operator==(const PairedDataset&) const = default;
};

/// The 28 one-dimensional geoscience pairs of CEP v1.0.
inline const std::vector<int>& default_geoscience_pairs() {
  static const std::vector<int> ids{1,  2,  3,  4,  20, 21, 42, 43, 44, 45, 46, 49, 50, 51,
                                    72, 73, 78, 79, 80, 81, 82, 83, 87, 89, 90, 91, 92, 93};
  return ids;
}

struct PairSelection {
  std::vector<int> ids = default_geoscience_pairs();
};

inline std::string pair_id(int number) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "pair%04d", number);
  return buf;
}

/// One pairmeta.txt line: pair number, cause columns, effect columns, weight
/// (1-based, inclusive).
struct PairMeta {
  int pair = 0;
  int cause_first = 0;
  int cause_last = 0;
  int effect_first = 0;
  int effect_last = 0;
  double weight = 1.0;

  bool operator==(const PairMeta&) const = default;
};

namespace detail {

inline bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Error parse_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  return Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace detail

/// Parses whitespace-separated numeric columns. Blank lines are skipped; every
/// other line must have the same number of numeric tokens.
inline Matrix parse_numeric_table(std::string_view text, const std::filesystem::path& source = "<text>") {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const auto tokens = detail::split_ws(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }
    if (columns == 0) columns = tokens.size();
    if (tokens.size() != columns) {
      throw detail::parse_error(source, line_no,
                                "expected " + std::to_string(columns) + " columns, found " +
                                    std::to_string(tokens.size()));
    }
    for (auto tok : tokens) {
      double v = 0.0;
      if (!detail::parse_double(tok, v)) {
        throw detail::parse_error(source, line_no, "non-numeric token '" + std::string(tok) + "'");
      }
      values.push_back(v);
    }
    ++rows;
    if (eol == text.size()) break;
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(columns));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * columns + c];
    }
  }
  return m;
}

inline PairMeta parse_pairmeta_line(std::string_view line, std::size_t line_no = 1,
                                    const std::filesystem::path& source = "<pairmeta>") {
  const auto tokens = detail::split_ws(line);
  if (tokens.size() != 6) {
    throw detail::parse_error(source, line_no, "pairmeta needs 6 fields, found " + std::to_string(tokens.size()));
  }
  double f[6];
  for (std::size_t i = 0; i < 6; ++i) {
    if (!detail::parse_double(tokens[i], f[i])) {
      throw detail::parse_error(source, line_no, "non-numeric token '" + std::string(tokens[i]) + "'");
    }
  }
  for (std::size_t i = 0; i < 5; ++i) {
    if (f[i] != std::floor(f[i]) || f[i] < 0) {
      throw detail::parse_error(source, line_no, "column fields must be non-negative integers");
    }
  }
  PairMeta meta{static_cast<int>(f[0]), static_cast<int>(f[1]), static_cast<int>(f[2]),
                static_cast<int>(f[3]), static_cast<int>(f[4]), f[5]};
  if (!(meta.weight > 0.0) || !std::isfinite(meta.weight)) {
    throw detail::parse_error(source, line_no, "weight must be positive");
  }
  return meta;
}

/// Reads a whole pairmeta.txt into a map keyed by pair number.
inline std::map<int, PairMeta> load_pairmeta(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  std::map<int, PairMeta> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::split_ws(line).empty()) continue;
    const PairMeta meta = parse_pairmeta_line(line, line_no, path);
    out[meta.pair] = meta;
  }
  return out;
}

/// Builds a pair from a parsed table. x is the lower-numbered of the two
/// designated columns, so the ground truth can point either way.
/// Cause/effect ranges of 0 mark an unannotated pair (columns 1 and 2).
inline PairedDataset make_pair(const Matrix& table, const PairMeta& meta,
                               const std::filesystem::path& source = "<table>") {
  const bool annotated = meta.cause_first > 0 && meta.effect_first > 0;
  if (annotated && (meta.cause_last != meta.cause_first || meta.effect_last != meta.effect_first)) {
    throw Error(ErrorKind::DimensionError,
                source.string() + ": cause or effect spans several columns; only 1-D pairs are supported");
  }
  const int cause = annotated ? meta.cause_first : 1;
  const int effect = annotated ? meta.effect_first : 2;
  const int needed = std::max(cause, effect);
  if (table.cols() < needed || table.cols() < 2) {
    throw Error(ErrorKind::DimensionError, source.string() + ": needs at least " +
                                               std::to_string(std::max(needed, 2)) + " columns, has " +
                                               std::to_string(table.cols()));
  }
  if (cause == effect) throw Error(ErrorKind::DimensionError, "cause and effect are the same column");
  if (table.rows() < 2) {
    throw Error(ErrorKind::InsufficientData, source.string() + ": needs at least 2 rows");
  }
  const int cx = std::min(cause, effect) - 1;
  const int cy = std::max(cause, effect) - 1;

  PairedDataset pair;
  pair.id = pair_id(meta.pair);
  pair.x = DataMatrix(table.col(cx));
  pair.y = DataMatrix(table.col(cy));
  pair.ground_truth = !annotated ? Direction::Unknown
                      : cause < effect ? Direction::XCausesY
                                       : Direction::YCausesX;
  pair.weight = meta.weight;
  return pair;
}

inline PairedDataset load_pair(const std::filesystem::path& data_file, const PairMeta& meta) {
  const std::string text = detail::read_file(data_file);
  return make_pair(parse_numeric_table(text, data_file), meta, data_file);
}

/// Loads pairNNNN.txt for each selected id using pairmeta.txt from the same directory.
inline std::vector<PairedDataset> load_selection(const std::filesystem::path& dir,
                                                 const PairSelection& selection) {
  const auto meta = load_pairmeta(dir / "pairmeta.txt");
  std::vector<PairedDataset> out;
  out.reserve(selection.ids.size());
  for (int id : selection.ids) {
    const auto it = meta.find(id);
    if (it == meta.end()) {
      throw Error(ErrorKind::IoError, "pairmeta.txt has no entry for pair " + std::to_string(id));
    }
    out.push_back(load_pair(dir / (pair_id(id) + ".txt"), it->second));
  }
  return out;
}

/// Inverse of make_pair for a 1-D pair: the two-column table and its meta line.
inline PairMeta pair_meta_of(const PairedDataset& pair, int number) {
  switch (pair.ground_truth) {
    case Direction::XCausesY: return {number, 1, 1, 2, 2, pair.weight};
    case Direction::YCausesX: return {number, 2, 2, 1, 1, pair.weight};
    case Direction::Unknown: break;
  }
  return {number, 0, 0, 0, 0, pair.weight};
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_pairmeta_line(const PairMeta& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d %d %d %d %d ", m.pair, m.cause_first, m.cause_last,
                m.effect_first, m.effect_last);
  return buf + format_double(m.weight);
}

inline void write_pair(const PairedDataset& pair, const std::filesystem::path& data_file) {
  std::ofstream out(data_file, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + data_file.string());
  for (Eigen::Index i = 0; i < pair.size(); ++i) {
    out << format_double(pair.x(i, 0)) << ' ' << format_double(pair.y(i, 0)) << '\n';
  }
}

/// Writes pairNNNN.txt files plus pairmeta.txt; pairs are numbered 1..N.
inline void write_collection(const std::vector<PairedDataset>& pairs, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream meta(dir / "pairmeta.txt", std::ios::binary);
  if (!meta) throw Error(ErrorKind::IoError, "cannot write " + (dir / "pairmeta.txt").string());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    write_pair(pairs[i], dir / (pair_id(number) + ".txt"));
    meta << format_pairmeta_line(pair_meta_of(pairs[i], number)) << '\n';
  }
}

/// Uniform subset of n_max rows without replacement, kept in original order.
/// Pairs with n <= n_max are returned unchanged.
inline PairedDataset subsample(const PairedDataset& pair, Eigen::Index n_max, std::uint64_t seed) {
  if (n_max < 2) throw Error(ErrorKind::InvalidConfig, "n_max must be at least 2");
  const Eigen::Index n = pair.size();
  if (n <= n_max) return pair;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  for (Eigen::Index i = 0; i < n_max; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(n_max));
  std::sort(idx.begin(), idx.end());

  Matrix x(n_max, pair.x.cols());
  Matrix y(n_max, pair.y.cols());
  for (Eigen::Index r = 0; r < n_max; ++r) {
    x.row(r) = pair.x.values().row(idx[static_cast<std::size_t>(r)]);
    y.row(r) = pair.y.values().row(idx[static_cast<std::size_t>(r)]);
  }
  PairedDataset out = pair;
  out.x = DataMatrix(std::move(x));
  out.y = DataMatrix(std::move(y));
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic additive-noise pairs

enum class Mechanism { Linear, Cubic, ExpDecay };
enum class BaseDistribution { Uniform, Gaussian };

inline Mechanism parse_mechanism(std::string_view s) {
  if (s == "linear") return Mechanism::Linear;
  if (s == "cubic") return Mechanism::Cubic;
  if (s == "exp_decay" || s == "exp-decay") return Mechanism::ExpDecay;
  throw Error(ErrorKind::ParseError, "unknown mechanism '" + std::string(s) + "'");
}

inline std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::Linear: return "linear";
    case Mechanism::Cubic: return "cubic";
    case Mechanism::ExpDecay: return "exp_decay";
  }
  return "linear";
}

inline BaseDistribution parse_base(std::string_view s) {
  if (s == "uniform") return BaseDistribution::Uniform;
  if (s == "gaussian" || s == "normal") return BaseDistribution::Gaussian;
  throw Error(ErrorKind::ParseError, "unknown base distribution '" + std::string(s) + "'");
}

inline std::string_view to_string(BaseDistribution b) {
  return b == BaseDistribution::Uniform ? "uniform" : "gaussian";
}

/// linear: 2x, cubic: x^3, exp_decay: exp(-x).
inline double apply_mechanism(Mechanism m, double x) {
  switch (m) {
    case Mechanism::Linear: return 2.0 * x;
    case Mechanism::Cubic: return x * x * x;
    case Mechanism::ExpDecay: return std::exp(-x);
  }
  return x;
}

/// Generator record: y = mechanism(x) + noise * N(0, 1), x ~ base
/// (Uniform(-1, 1) or N(0, 1)). `pairs` sizes a synthetic suite.
struct SynthSpec {
  Mechanism mechanism = Mechanism::Cubic;
  double noise = 0.1;
  Eigen::Index n = 500;
  BaseDistribution base = BaseDistribution::Uniform;
  int pairs = 50;
};

/// Parses `key = value` lines (`#` comments allowed). Unknown keys are errors.
inline SynthSpec parse_synth_spec(std::string_view text, const std::filesystem::path& source = "<synth>") {
  SynthSpec spec;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::split_ws(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw detail::parse_error(source, line_no, "expected key = value");
    const auto key_tok = detail::split_ws(std::string_view(line).substr(0, eq));
    const auto val_tok = detail::split_ws(std::string_view(line).substr(eq + 1));
    if (key_tok.size() != 1 || val_tok.size() != 1) {
      throw detail::parse_error(source, line_no, "expected key = value");
    }
    const std::string key(key_tok[0]);
    const std::string_view val = val_tok[0];
    double num = 0.0;
    auto number = [&]() {
      if (!detail::parse_double(val, num)) throw detail::parse_error(source, line_no, "bad number for " + key);
      return num;
    };
    auto tag = [&](auto parse) {
      try {
        return parse(val);
      } catch (const Error& e) {
        throw detail::parse_error(source, line_no, e.what());
      }
    };
    if (key == "mechanism") {
      spec.mechanism = tag(parse_mechanism);
    } else if (key == "noise") {
      spec.noise = number();
      if (spec.noise < 0) throw detail::parse_error(source, line_no, "noise must be >= 0");
    } else if (key == "n") {
      spec.n = static_cast<Eigen::Index>(number());
      if (spec.n < 2) throw detail::parse_error(source, line_no, "n must be >= 2");
    } else if (key == "base") {
      spec.base = tag(parse_base);
    } else if (key == "pairs") {
      spec.pairs = static_cast<int>(number());
      if (spec.pairs < 1) throw detail::parse_error(source, line_no, "pairs must be >= 1");
    } else {
      throw detail::parse_error(source, line_no, "unknown key '" + key + "'");
    }
  }
  return spec;
}

inline SynthSpec load_synth_spec(const std::filesystem::path& path) {
  return parse_synth_spec(detail::read_file(path), path);
}

inline PairedDataset synth_anm_pair(const SynthSpec& spec, std::uint64_t seed, std::string id = "synthetic") {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(spec.n, 1);
  Matrix y(spec.n, 1);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    x(i, 0) = spec.base == BaseDistribution::Uniform ? uniform(rng) : normal(rng);
  }
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const double e = spec.noise > 0.0 ? spec.noise * normal(rng) : 0.0;
    y(i, 0) = apply_mechanism(spec.mechanism, x(i, 0)) + e;
  }
  return {std::move(id), DataMatrix(std::move(x)), DataMatrix(std::move(y)), Direction::XCausesY, 1.0};
}

/// `spec.pairs` independent pairs with per-pair derived seeds; ids synth0001, ...
inline std::vector<PairedDataset> synth_suite(const SynthSpec& spec, std::uint64_t seed) {
  std::vector<PairedDataset> out;
  out.reserve(static_cast<std::size_t>(spec.pairs));
  for (int i = 0; i < spec.pairs; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "synth%04d", i + 1);
    out.push_back(synth_anm_pair(spec, derive_seed(seed, {kStreamSynthetic, std::uint64_t(i)}), id));
  }
  return out;
}

}  // namespace causens
