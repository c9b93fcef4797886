#include "shrinkbench/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "shrinkbench/bench.hpp"
#include "shrinkbench/csv.hpp"
#include "shrinkbench/errors.hpp"
#include "shrinkbench/report.hpp"
#include "shrinkbench/synthetic.hpp"

namespace shrinkbench {

namespace {

struct CliOptions {
  std::string target = "AAPL.Close";
  int horizon = 10;
  int k = 10;
  std::uint64_t seed = 7;
  std::string methods = "default";
  double epsilon = 0.25;
  double gap_ref = 0.0;
  double time_scale = 1.0;
  std::string normalization = "zscore";
  int dtw_band = -1;  // < 0 means unconstrained
  int prescreen = 50;
  double sa_t0 = 0.01;
  double sa_alpha = 0.95;
  int sa_iters = 200;
  int lasso_path_len = 50;
  double lasso_tol = 1e-6;
  int lasso_max_sweeps = 1000;
  int trees = 100;
  int max_depth = 8;
  int min_leaf = 5;
  int schedule_step = 5;
  int schedule_min = 20;
  bool full_schedule = false;
  std::string shrink_policy = "suffix";
  int threads = 0;
  std::string out_dir = "out";
  std::string data_dir;
  std::string synthetic;
  std::string date_start = "2016-01-01";
  std::string date_end = "2024-01-28";
  bool no_timestamp = false;
  std::string method = "var";     // select subcommand
  std::string report_in;          // report subcommand
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<MethodId> parse_methods(const std::string& text) {
  if (text == "default") return default_methods();
  if (text == "all") {
    std::vector<MethodId> all = default_methods();
    all.push_back(MethodId::Lcss);
    all.push_back(MethodId::Erp);
    all.push_back(MethodId::Sspd);
    return all;
  }
  std::vector<MethodId> out;
  for (const std::string& name : split_list(text)) out.push_back(method_from_string(name));
  if (out.empty()) throw UsageError("--methods: empty method list");
  return out;
}

SelectorSpec base_spec(const CliOptions& opt) {
  SelectorSpec spec;
  spec.k = opt.k;
  spec.seed = opt.seed;
  spec.wrapper_prescreen = opt.prescreen;
  spec.metric_params.epsilon_match = opt.epsilon;
  spec.metric_params.gap_ref = opt.gap_ref;
  spec.metric_params.time_scale = opt.time_scale;
  spec.metric_params.normalization = normalization_from_string(opt.normalization);
  if (opt.dtw_band >= 0) spec.metric_params.dtw_band = opt.dtw_band;
  spec.sa_params = {opt.sa_t0, opt.sa_alpha, opt.sa_iters};
  spec.lasso_params = {opt.lasso_path_len, opt.lasso_tol, opt.lasso_max_sweeps};
  spec.forest_params = {opt.trees, opt.max_depth, opt.min_leaf};
  return spec;
}

struct DatasetWithSource {
  AlignedDataset ds;
  std::string source;
  std::size_t dropped_rows = 0;
  std::size_t files = 0;
};

DatasetWithSource build_dataset(const CliOptions& opt) {
  std::vector<TimeSeries> series;
  std::string source;
  std::size_t dropped = 0;
  std::size_t files = 0;
  if (!opt.data_dir.empty()) {
    std::optional<CalendarDate> start, end;
    if (!opt.date_start.empty()) start = CalendarDate::parse(opt.date_start);
    if (!opt.date_end.empty()) end = CalendarDate::parse(opt.date_end);
    DirectoryLoad load = load_directory(opt.data_dir, start, end);
    series = std::move(load.series);
    dropped = load.dropped_rows;
    files = load.files;
    source = "data_dir " + opt.data_dir + " [" + opt.date_start + ".." + opt.date_end + "]";
  } else {
    const SyntheticSpec spec = parse_synthetic_spec(opt.synthetic);
    SyntheticData data = generate_synthetic(spec);
    series = std::move(data.series);
    std::ostringstream os;
    os << "synthetic n_rows=" << spec.n_rows << ",n_tickers=" << spec.n_tickers
       << ",planted_count=" << spec.planted_count << ",noise_sigma=" << spec.noise_sigma
       << ",seed=" << spec.seed;
    source = os.str();
  }
  FeatureMatrix matrix = align(series);
  AlignedDataset ds = build_horizon_target(matrix, opt.target, opt.horizon);
  return {std::move(ds), std::move(source), dropped, files};
}

ShrinkSchedule build_schedule(const CliOptions& opt) {
  ShrinkSchedule schedule = opt.full_schedule ? ShrinkSchedule::full()
                                              : ShrinkSchedule::stepped(opt.schedule_step,
                                                                        opt.schedule_min);
  schedule.row_policy = shrink_policy_from_string(opt.shrink_policy);
  return schedule;
}

int cmd_ingest(const CliOptions& opt) {
  if (opt.data_dir.empty()) throw UsageError("ingest: --data-dir is required");
  const DatasetWithSource data = build_dataset(opt);
  const FeatureMatrix& m = data.ds.features();
  std::cout << "files:         " << data.files << "\n";
  std::cout << "series:        " << m.n_cols() << "\n";
  std::cout << "dropped rows:  " << data.dropped_rows << "\n";
  std::cout << "aligned rows:  " << m.n_rows() << " (after horizon " << opt.horizon << ")\n";
  std::cout << "date range:    " << m.dates().front().to_string() << " .. "
            << m.dates().back().to_string() << "\n";
  std::cout << "target:        " << data.ds.target_id() << "\n";
  return 0;
}

int cmd_synth(const CliOptions& opt) {
  const SyntheticSpec spec = parse_synthetic_spec(opt.synthetic);
  const SyntheticData data = generate_synthetic(spec);
  write_synthetic_csvs(data, opt.out_dir);
  std::cout << "wrote " << data.series.size() / 5 << " ticker files + manifest.json to "
            << opt.out_dir << "\n";
  std::cout << "planted:";
  for (const std::string& id : data.planted_ids) std::cout << ' ' << id;
  std::cout << "\n";
  return 0;
}

int cmd_select(const CliOptions& opt) {
  const DatasetWithSource data = build_dataset(opt);
  SelectorSpec spec = base_spec(opt);
  spec.method_id = method_from_string(opt.method);
  const SelectionResult result = select(data.ds, spec);

  const FeatureMatrix& m = data.ds.features();
  std::cout << "method: " << to_string(result.method_id) << "  k: " << spec.k << "\n";
  for (std::size_t i = 0; i < result.selected.size(); ++i) {
    const auto col = m.column_index(result.selected[i]);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", result.scores[*col]);
    std::cout << i + 1 << ". " << result.selected[i] << "  score=" << buf << "\n";
  }
  for (const auto& [key, value] : result.diagnostics) {
    if (key == "sa_decisions" || key == "step_r2") continue;  // long traces
    std::cout << "# " << key << ": " << value << "\n";
  }
  return 0;
}

int cmd_bench(const CliOptions& opt) {
  const DatasetWithSource data = build_dataset(opt);
  const std::vector<MethodId> ids = parse_methods(opt.methods);
  std::vector<SelectorSpec> specs;
  specs.reserve(ids.size());
  for (const MethodId id : ids) {
    SelectorSpec spec = base_spec(opt);
    spec.method_id = id;
    specs.push_back(spec);
  }
  SensitivityReport report =
      run_benchmark(data.ds, specs, build_schedule(opt), opt.seed, opt.threads);
  report.config.extras["source"] = data.source;
  emit_report(report, opt.out_dir, {opt.no_timestamp});

  std::cout << "benchmark: " << ids.size() << " methods x " << report.config.schedule.fractions.size()
            << " fractions on " << data.ds.n_rows() << " rows -> " << opt.out_dir << "\n";
  for (const MethodTrajectory& t : report.trajectories) {
    char buf[64];
    if (t.stats_ok) {
      std::snprintf(buf, sizeof(buf), "mean_r2=%.6f slope=%.6f fluct=%.6f", t.mean_r2_overall,
                    t.slope, t.fluctuation);
    } else {
      std::snprintf(buf, sizeof(buf), "no statistics (%d error cells)", t.error_cells);
    }
    std::cout << "  " << t.method_id << ": " << buf << "\n";
  }
  return 0;
}

int cmd_report(const CliOptions& opt) {
  if (opt.report_in.empty()) throw UsageError("report: --in <report.json> is required");
  std::ifstream in(opt.report_in, std::ios::binary);
  if (!in) throw DataError("cannot open '" + opt.report_in + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  SensitivityReport report = report_from_json(buffer.str());
  finalize_statistics(report);
  emit_report(report, opt.out_dir, {opt.no_timestamp});
  std::cout << "re-rendered " << report.trajectories.size() << " trajectories -> " << opt.out_dir
            << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CliOptions opt;
  CLI::App app{"shrinkbench: time-series feature-selection sensitivity benchmark"};
  app.fallthrough();
  app.set_config("--config")->configurable(false);
  app.require_subcommand(1);

  app.add_option("--target", opt.target, "Target column id");
  app.add_option("--horizon", opt.horizon, "Forecast horizon in rows")->check(CLI::NonNegativeNumber);
  app.add_option("--k", opt.k, "Features every selector returns")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Master seed");
  app.add_option("--methods", opt.methods,
                 "'default', 'all', or comma list (var,cor,mutual_information,forward,backward,"
                 "stepwise,rfe,simulated,lasso,tree_base,eu,dtw,hausdorff,frechet,edit_distance,"
                 "lcss,erp,sspd)");
  app.add_option("--epsilon", opt.epsilon, "LCSS/EDR match threshold (z-units)");
  app.add_option("--gap-ref", opt.gap_ref, "ERP reference point g");
  app.add_option("--time-scale", opt.time_scale, "Time-axis weight for geometric measures");
  app.add_option("--normalization", opt.normalization, "zscore|none");
  app.add_option("--dtw-band", opt.dtw_band, "Sakoe-Chiba band (-1 = unconstrained)");
  app.add_option("--prescreen", opt.prescreen, "Wrapper correlation prescreen pool size");
  app.add_option("--sa-t0", opt.sa_t0, "Annealing start temperature");
  app.add_option("--sa-alpha", opt.sa_alpha, "Annealing cooling factor");
  app.add_option("--sa-iters", opt.sa_iters, "Annealing iterations");
  app.add_option("--lasso-path-len", opt.lasso_path_len, "Lasso path length");
  app.add_option("--lasso-tol", opt.lasso_tol, "Lasso convergence tolerance");
  app.add_option("--lasso-max-sweeps", opt.lasso_max_sweeps, "Lasso sweep cap per lambda");
  app.add_option("--trees", opt.trees, "Forest size");
  app.add_option("--max-depth", opt.max_depth, "Tree depth cap");
  app.add_option("--min-leaf", opt.min_leaf, "Minimum samples per leaf");
  app.add_option("--schedule-step", opt.schedule_step, "Shrink step in percent points");
  app.add_option("--schedule-min", opt.schedule_min, "Smallest retained percent (>= 20)");
  app.add_flag("--full-schedule", opt.full_schedule, "1-point steps: 81 evaluation points");
  app.add_option("--shrink-policy", opt.shrink_policy, "suffix|prefix|random");
  app.add_option("--threads", opt.threads,
                 "Worker threads (0 = auto; SHRINKBENCH_THREADS overrides)");
  app.add_option("--out", opt.out_dir, "Output directory");
  auto* data_dir_opt = app.add_option("--data-dir", opt.data_dir, "Directory of per-ticker CSVs");
  auto* synthetic_opt =
      app.add_option("--synthetic", opt.synthetic,
                     "Synthetic spec: n_rows=600,n_tickers=24,planted_count=3,"
                     "noise_sigma=0.05,seed=7 (empty value = those defaults)");
  data_dir_opt->excludes(synthetic_opt);
  app.add_option("--date-start", opt.date_start, "Ingest window start (YYYY-MM-DD, '' = open)");
  app.add_option("--date-end", opt.date_end, "Ingest window end (YYYY-MM-DD, '' = open)");
  app.add_flag("--no-timestamp", opt.no_timestamp, "Omit the timestamp from report.md");

  CLI::App* ingest = app.add_subcommand("ingest", "Validate and align a data directory");
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic dataset + manifest");
  CLI::App* sel = app.add_subcommand("select", "Run one selector at full data size");
  sel->add_option("--method", opt.method, "Selector method id");
  CLI::App* bench = app.add_subcommand("bench", "Run the full sensitivity benchmark");
  CLI::App* report = app.add_subcommand("report", "Re-render outputs from a report.json");
  report->add_option("--in", opt.report_in, "Existing report.json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help();
    return 1;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(opt);
    if (synth->parsed()) return cmd_synth(opt);
    if (sel->parsed()) return cmd_select(opt);
    if (bench->parsed()) return cmd_bench(opt);
    if (report->parsed()) return cmd_report(opt);
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace shrinkbench
