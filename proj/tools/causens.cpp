// causens: command-line front end for direction inference, the benchmark
// sweep, curve export and the gradient self-check.
//
// Exit codes: 0 success, 1 self-check failure, 2 input error, 3 degenerate data.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "causens/causens.hpp"
#include "causens/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace causens;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

constexpr const char* kDatasetUrl = "https://webdav.tuebingen.mpg.de/cause-effect/";

struct RegressorFlags {
  std::string kind = "random_forest";
  int trees = 100;
  int max_depth = -1;
  int min_leaf = 5;
  double lambda = 1e-3;
  double ridge_bandwidth = 0.0;

  void add_to(CLI::App& app) {
    app.add_option("--regressor", kind, "random_forest (rf) or kernel_ridge (krr)")->capture_default_str();
    app.add_option("--trees", trees, "forest size")->capture_default_str();
    app.add_option("--max-depth", max_depth, "tree depth limit, negative for none")->capture_default_str();
    app.add_option("--min-leaf", min_leaf, "minimum samples per leaf")->capture_default_str();
    app.add_option("--lambda", lambda, "kernel ridge penalty")->capture_default_str();
    app.add_option("--ridge-bandwidth", ridge_bandwidth, "kernel ridge sigma, 0 for median heuristic")
        ->capture_default_str();
  }

  RegressorSpec spec(std::uint64_t seed) const {
    RegressorSpec s;
    s.kind = parse_regressor_kind(kind);
    s.forest.tree_count = trees;
    s.forest.max_depth = max_depth;
    s.forest.min_leaf_size = min_leaf;
    s.ridge.lambda = lambda;
    s.ridge.bandwidth = ridge_bandwidth;
    s.seed = seed;
    s.validate();
    return s;
  }

  json to_json() const {
    return {{"kind", std::string(to_string(parse_regressor_kind(kind)))},
            {"trees", trees},
            {"max_depth", max_depth},
            {"min_leaf", min_leaf},
            {"lambda", lambda},
            {"ridge_bandwidth", ridge_bandwidth}};
  }
};

int exit_code_for(const Error& e) {
  return e.is_degenerate() ? kExitDegenerate : kExitInput;
}

json verdict_json(const DirectionVerdict& v) {
  return {{"score_c", v.score_c},
          {"score_cs", v.score_cs},
          {"direction_c", std::string(to_string(v.direction_c))},
          {"direction_cs", std::string(to_string(v.direction_cs))},
          {"hsic_forward", v.hsic_forward.statistic},
          {"hsic_backward", v.hsic_backward.statistic},
          {"sigma_forward", {v.hsic_forward.sigma_x, v.hsic_forward.sigma_y}},
          {"sigma_backward", {v.hsic_backward.sigma_x, v.hsic_backward.sigma_y}},
          {"sens_forward_x", v.sens_forward_x},
          {"sens_forward_r", v.sens_forward_r},
          {"sens_backward_y", v.sens_backward_y},
          {"sens_backward_r", v.sens_backward_r}};
}

const char* arrow(Direction d) {
  return d == Direction::XCausesY ? "x -> y" : d == Direction::YCausesX ? "y -> x" : "?";
}

// ---------------------------------------------------------------------------

struct InferArgs {
  std::string pair_file;
  std::string x_file;
  std::string y_file;
  std::string json_out;
  std::uint64_t seed = 0;
  int cs_sign = 1;
  RegressorFlags regressor;
};

DataMatrix load_single_column(const std::string& file) {
  const Matrix table = parse_numeric_table(detail::read_file(file), file);
  if (table.cols() != 1) {
    throw Error(ErrorKind::DimensionError, file + ": expected one column, found " + std::to_string(table.cols()));
  }
  return DataMatrix(table);
}

int run_infer(const InferArgs& args) {
  PairedDataset pair;
  if (!args.pair_file.empty()) {
    const Matrix table = parse_numeric_table(detail::read_file(args.pair_file), args.pair_file);
    pair = make_pair(table, PairMeta{0, 0, 0, 0, 0, 1.0}, args.pair_file);
    pair.id = fs::path(args.pair_file).stem().string();
  } else {
    if (args.x_file.empty() || args.y_file.empty()) {
      throw Error(ErrorKind::InvalidConfig, "infer needs --pair FILE or both --x FILE and --y FILE");
    }
    pair.id = fs::path(args.x_file).stem().string();
    pair.x = load_single_column(args.x_file);
    pair.y = load_single_column(args.y_file);
  }

  CausalOptions options;
  options.cs_sign = args.cs_sign;
  const RegressorSpec spec = args.regressor.spec(args.seed);
  const DirectionVerdict v = infer_direction(pair, spec, options);

  std::printf("pair: %s (n=%ld)\n", pair.id.c_str(), static_cast<long>(pair.size()));
  std::printf("score_c:  %.10g  -> %s (%s)\n", v.score_c, arrow(v.direction_c), std::string(to_string(v.direction_c)).c_str());
  std::printf("score_cs: %.10g  -> %s (%s)\n", v.score_cs, arrow(v.direction_cs),
              std::string(to_string(v.direction_cs)).c_str());
  std::printf("hsic forward (x, r_f): %.6g   backward (y, r_b): %.6g\n", v.hsic_forward.statistic,
              v.hsic_backward.statistic);
  std::printf("sensitivity forward x=%.6g r=%.6g   backward y=%.6g r=%.6g\n", v.sens_forward_x,
              v.sens_forward_r, v.sens_backward_y, v.sens_backward_r);

  if (!args.json_out.empty()) {
    json j = verdict_json(v);
    j["pair_id"] = pair.id;
    j["n"] = pair.size();
    j["config"] = {{"regressor", args.regressor.to_json()}, {"seed", args.seed}, {"cs_sign", args.cs_sign}};
    j["version"] = kVersion;
    std::ofstream out(args.json_out);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + args.json_out);
    out << j.dump(2) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string data_dir;
  std::string synthetic;
  std::string output_dir = "bench_out";
  std::vector<int> pairs;
  std::vector<long> n_max{50, 100, 200, 500, 2000};
  int realizations = 10;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  int cs_sign = 1;
  bool quiet = false;
  RegressorFlags regressor;
};

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  fn(out);
}

int run_bench(BenchArgs args) {
  std::vector<PairedDataset> pairs;
  json selection;
  if (!args.synthetic.empty()) {
    const SynthSpec synth = load_synth_spec(args.synthetic);
    pairs = synth_suite(synth, derive_seed(args.seed, {kStreamSynthetic}));
    selection = {{"synthetic",
                  {{"mechanism", std::string(to_string(synth.mechanism))},
                   {"noise", synth.noise},
                   {"n", synth.n},
                   {"base", std::string(to_string(synth.base))},
                   {"pairs", synth.pairs}}}};
  } else {
    if (args.data_dir.empty()) {
      throw Error(ErrorKind::InvalidConfig, "bench needs --data-dir (or CAUSENS_DATA_DIR) or --synthetic FILE");
    }
    PairSelection sel;
    if (!args.pairs.empty()) sel.ids = args.pairs;
    pairs = load_selection(args.data_dir, sel);
    selection = {{"pairs", sel.ids}};
  }

  BenchmarkConfig config;
  config.n_max_list.assign(args.n_max.begin(), args.n_max.end());
  config.realizations = args.realizations;
  config.regressor = args.regressor.spec(0);
  config.causal.cs_sign = args.cs_sign;
  config.seed = args.seed;
  config.threads = args.threads;

  const json run_config = {{"data_dir", args.data_dir},
                           {"output_dir", args.output_dir},
                           {"selection", selection},
                           {"regressor", args.regressor.to_json()},
                           {"n_max_list", args.n_max},
                           {"realizations", args.realizations},
                           {"seed", args.seed},
                           {"cs_sign", args.cs_sign},
                           {"standardize", config.causal.standardize},
                           {"min_samples", config.causal.min_samples}};

  std::size_t done = 0;
  const std::size_t total = pairs.size() * config.n_max_list.size() * std::size_t(config.realizations);
  const auto records = run_benchmark(pairs, config, [&](const BenchmarkRecord& r) {
    ++done;
    if (!args.quiet) {
      std::fprintf(stderr, "[%zu/%zu] %s n_max=%ld r=%d %s\n", done, total, r.pair_id.c_str(),
                   static_cast<long>(r.n_max), r.realization, r.ok() ? "ok" : r.error.c_str());
    }
  });

  const fs::path out_dir(args.output_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "records.csv", [&](std::ostream& o) { write_records_csv(o, records, run_config); });
  write_file(out_dir / "timings.csv", [&](std::ostream& o) { write_timings_csv(o, records); });

  json summary = summary_json(records, run_config);
  summary["execution"] = {{"threads", args.threads}};
  const bool any_ok = std::any_of(records.begin(), records.end(), [](const auto& r) { return r.ok(); });
  if (any_ok) {
    write_file(out_dir / "curves.csv", [&](std::ostream& o) { write_curves_csv(o, records, run_config); });
  }
  write_file(out_dir / "summary.json", [&](std::ostream& o) { o << summary.dump(2) << '\n'; });

  std::printf("records: %zu (%zu failed)\n", records.size(), summary["failed_records"].size());
  for (const auto& row : summary["auc_table"]) {
    std::printf("n_max=%-5ld %-2s mean AUC %.4f  std %.4f\n", row["n_max"].get<long>(),
                row["criterion"].get<std::string>().c_str(), row["mean_auc"].get<double>(),
                row["std_auc"].get<double>());
  }
  std::printf("outputs written to %s\n", out_dir.string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CurvesArgs {
  std::string records;
  std::string out = "curves.csv";
  std::string weighting = "pair";
};

int run_curves(const CurvesArgs& args) {
  std::ifstream in(args.records);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + args.records);
  std::string first;
  std::getline(in, first);
  json run_config = json::object();
  const std::string prefix = "# config: ";
  if (first.rfind(prefix, 0) == 0) {
    run_config = json::parse(first.substr(prefix.size()), nullptr, false);
    if (run_config.is_discarded()) throw Error(ErrorKind::ParseError, args.records + ":1: bad config line");
  }
  in.clear();
  in.seekg(0);
  const auto records = read_records_csv(in);
  const Weighting w = args.weighting == "uniform" ? Weighting::Uniform : Weighting::PairWeights;
  if (args.weighting != "uniform" && args.weighting != "pair") {
    throw Error(ErrorKind::InvalidConfig, "weighting must be 'pair' or 'uniform'");
  }
  write_file(args.out, [&](std::ostream& o) { write_curves_csv(o, records, run_config, w); });
  for (const auto& row : auc_vs_nmax_table(records, w)) {
    std::printf("n_max=%-5ld %-2s mean AUC %.4f  std %.4f  (%d realizations)\n", static_cast<long>(row.n_max),
                std::string(to_string(row.criterion)).c_str(), row.mean_auc, row.std_auc, row.realizations);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GradcheckArgs {
  std::vector<long> sizes{2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  std::vector<long> dims{1, 2};
  int seeds = 5;
  std::uint64_t seed = 0;
  double tolerance = 1e-4;
};

int run_gradcheck_cmd(const GradcheckArgs& args) {
  GradcheckOptions opt;
  opt.sizes.assign(args.sizes.begin(), args.sizes.end());
  opt.dims.assign(args.dims.begin(), args.dims.end());
  opt.seeds = args.seeds;
  opt.seed = args.seed;
  opt.tolerance = args.tolerance;
  for (auto n : opt.sizes) {
    if (n < 2) throw Error(ErrorKind::InvalidConfig, "gradcheck sizes must be >= 2");
  }
  for (auto d : opt.dims) {
    if (d < 1) throw Error(ErrorKind::InvalidConfig, "gradcheck dims must be >= 1");
  }
  const GradcheckReport r = run_gradcheck(opt);
  std::printf("instances: %d  failures: %d  worst relative error: %.3e (n=%ld)  tolerance: %.3e\n", r.instances,
              r.failures, r.worst_error, static_cast<long>(r.worst_n), args.tolerance);
  std::printf("%s\n", r.passed() ? "PASS" : "FAIL");
  return r.passed() ? kExitOk : kExitCheckFailed;
}

// ---------------------------------------------------------------------------

int run_fetch(const std::string& data_dir, const std::vector<int>& ids_flag) {
  std::printf("CauseEffectPairs v1.0: %s\n", kDatasetUrl);
  std::printf("Download pairmeta.txt and pairNNNN.txt into a directory and pass it as --data-dir "
              "(or set CAUSENS_DATA_DIR).\n");
  if (data_dir.empty()) return kExitOk;
  PairSelection sel;
  if (!ids_flag.empty()) sel.ids = ids_flag;
  const fs::path dir(data_dir);
  int missing = 0;
  std::map<int, PairMeta> meta;
  try {
    meta = load_pairmeta(dir / "pairmeta.txt");
  } catch (const Error& e) {
    std::printf("missing or unreadable: %s (%s)\n", (dir / "pairmeta.txt").string().c_str(), e.what());
    return kExitInput;
  }
  for (int id : sel.ids) {
    const fs::path file = dir / (pair_id(id) + ".txt");
    if (!fs::exists(file)) {
      std::printf("missing: %s\n", file.string().c_str());
      ++missing;
    } else if (!meta.count(id)) {
      std::printf("no pairmeta entry: %d\n", id);
      ++missing;
    }
  }
  std::printf("%zu of %zu selected pairs present in %s\n", sel.ids.size() - std::size_t(missing), sel.ids.size(),
              data_dir.c_str());
  return missing == 0 ? kExitOk : kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causens: causal direction from HSIC and HSIC sensitivity maps"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  InferArgs infer;
  auto* infer_cmd = app.add_subcommand("infer", "infer the causal direction of one pair");
  infer_cmd->add_option("--pair", infer.pair_file, "whitespace-separated file, columns 1 and 2 are x and y");
  infer_cmd->add_option("--x", infer.x_file, "single-column file for x");
  infer_cmd->add_option("--y", infer.y_file, "single-column file for y");
  infer_cmd->add_option("--json", infer.json_out, "also write the verdict as JSON");
  infer_cmd->add_option("--seed", infer.seed, "regressor seed")->capture_default_str();
  infer_cmd->add_option("--cs-sign", infer.cs_sign, "orientation of the sensitivity score (1 or -1)")
      ->check(CLI::IsMember({1, -1}))
      ->capture_default_str();
  infer.regressor.add_to(*infer_cmd);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "run the n_max x realization benchmark sweep");
  bench_cmd->set_config("--config", "", "INI/TOML config file; command-line flags take precedence");
  bench_cmd->add_option("--data-dir", bench.data_dir, "directory with pairmeta.txt and pairNNNN.txt")
      ->envname("CAUSENS_DATA_DIR");
  bench_cmd->add_option("--synthetic", bench.synthetic, "synthetic generator spec (key = value lines)");
  bench_cmd->add_option("--out", bench.output_dir, "output directory")->capture_default_str();
  bench_cmd->add_option("--pairs", bench.pairs, "pair numbers (default: the 28 geoscience pairs)")->delimiter(',');
  bench_cmd->add_option("--nmax", bench.n_max, "sample caps")->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--realizations", bench.realizations)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads, "worker threads, 0 for all cores")->capture_default_str();
  bench_cmd->add_option("--cs-sign", bench.cs_sign)->check(CLI::IsMember({1, -1}))->capture_default_str();
  bench_cmd->add_flag("--quiet", bench.quiet, "no per-record progress");
  bench.regressor.add_to(*bench_cmd);

  CurvesArgs curves;
  auto* curves_cmd = app.add_subcommand("curves", "recompute ROC/PR curves and AUCs from a records CSV");
  curves_cmd->add_option("--records", curves.records)->required();
  curves_cmd->add_option("--out", curves.out)->capture_default_str();
  curves_cmd->add_option("--weighting", curves.weighting, "pair or uniform")->capture_default_str();

  GradcheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "compare analytic HSIC gradients with finite differences");
  grad_cmd->add_option("--sizes", grad.sizes)->delimiter(',')->capture_default_str();
  grad_cmd->add_option("--dims", grad.dims)->delimiter(',')->capture_default_str();
  grad_cmd->add_option("--seeds", grad.seeds, "instances per (n, d_x, d_y)")->capture_default_str();
  grad_cmd->add_option("--seed", grad.seed)->capture_default_str();
  grad_cmd->add_option("--tol", grad.tolerance)->capture_default_str();

  std::string fetch_dir;
  std::vector<int> fetch_pairs;
  auto* fetch_cmd = app.add_subcommand("fetch", "print the dataset URL and check a local copy");
  fetch_cmd->add_option("--data-dir", fetch_dir)->envname("CAUSENS_DATA_DIR");
  fetch_cmd->add_option("--pairs", fetch_pairs)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*infer_cmd) return run_infer(infer);
    if (*bench_cmd) return run_bench(bench);
    if (*curves_cmd) return run_curves(curves);
    if (*grad_cmd) return run_gradcheck_cmd(grad);
    if (*fetch_cmd) return run_fetch(fetch_dir, fetch_pairs);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (e.is_degenerate()) std::fprintf(stderr, "degenerate data, no direction can be inferred\n");
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
