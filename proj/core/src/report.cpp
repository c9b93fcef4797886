#include "shrinkbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>
#include <sstream>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/svg.hpp"

namespace shrinkbench {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double num_from(const json& j) { return j.is_null() ? kNan : j.get<double>(); }

bool same_number(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return a == b;
}

std::string fixed6(double v) {
  if (!std::isfinite(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

json spec_to_json(const SelectorSpec& spec) {
  json j;
  j["method_id"] = to_string(spec.method_id);
  j["k"] = spec.k;
  j["seed"] = spec.seed;
  j["wrapper_prescreen"] = spec.wrapper_prescreen;
  j["metric_params"] = {
      {"epsilon_match", spec.metric_params.epsilon_match},
      {"gap_ref", spec.metric_params.gap_ref},
      {"time_scale", spec.metric_params.time_scale},
      {"normalization", to_string(spec.metric_params.normalization)},
      {"dtw_band", spec.metric_params.dtw_band ? json(*spec.metric_params.dtw_band)
                                               : json(nullptr)},
  };
  j["sa_params"] = {{"t0", spec.sa_params.t0},
                    {"alpha", spec.sa_params.alpha},
                    {"iters", spec.sa_params.iters}};
  j["lasso_params"] = {{"path_len", spec.lasso_params.path_len},
                       {"tol", spec.lasso_params.tol},
                       {"max_sweeps", spec.lasso_params.max_sweeps}};
  j["forest_params"] = {{"trees", spec.forest_params.trees},
                        {"max_depth", spec.forest_params.max_depth},
                        {"min_leaf", spec.forest_params.min_leaf}};
  return j;
}

SelectorSpec spec_from_json(const json& j) {
  SelectorSpec spec;
  spec.method_id = method_from_string(j.at("method_id").get<std::string>());
  spec.k = j.at("k").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.wrapper_prescreen = j.at("wrapper_prescreen").get<int>();
  const json& mp = j.at("metric_params");
  spec.metric_params.epsilon_match = mp.at("epsilon_match").get<double>();
  spec.metric_params.gap_ref = mp.at("gap_ref").get<double>();
  spec.metric_params.time_scale = mp.at("time_scale").get<double>();
  spec.metric_params.normalization =
      normalization_from_string(mp.at("normalization").get<std::string>());
  if (!mp.at("dtw_band").is_null()) spec.metric_params.dtw_band = mp.at("dtw_band").get<int>();
  const json& sa = j.at("sa_params");
  spec.sa_params = {sa.at("t0").get<double>(), sa.at("alpha").get<double>(),
                    sa.at("iters").get<int>()};
  const json& la = j.at("lasso_params");
  spec.lasso_params = {la.at("path_len").get<int>(), la.at("tol").get<double>(),
                       la.at("max_sweeps").get<int>()};
  const json& fo = j.at("forest_params");
  spec.forest_params = {fo.at("trees").get<int>(), fo.at("max_depth").get<int>(),
                        fo.at("min_leaf").get<int>()};
  return spec;
}

json config_to_json(const BenchConfig& config) {
  json j;
  j["seed"] = config.seed;
  j["target_id"] = config.target_id;
  j["horizon"] = config.horizon;
  j["schedule"] = {{"fractions", config.schedule.fractions},
                   {"row_policy", to_string(config.schedule.row_policy)}};
  j["methods"] = json::array();
  for (const SelectorSpec& spec : config.methods) j["methods"].push_back(spec_to_json(spec));
  j["extras"] = config.extras;
  return j;
}

BenchConfig config_from_json(const json& j) {
  BenchConfig config;
  config.seed = j.at("seed").get<std::uint64_t>();
  config.target_id = j.at("target_id").get<std::string>();
  config.horizon = j.at("horizon").get<int>();
  config.schedule.fractions = j.at("schedule").at("fractions").get<std::vector<double>>();
  config.schedule.row_policy =
      shrink_policy_from_string(j.at("schedule").at("row_policy").get<std::string>());
  for (const json& m : j.at("methods")) config.methods.push_back(spec_from_json(m));
  config.extras = j.at("extras").get<std::map<std::string, std::string>>();
  return config;
}

std::string config_comment(const SensitivityReport& report) {
  return "config " + config_to_json(report.config).dump();
}

// Trajectories sorted by a rank map (rank 1 first).
std::vector<const MethodTrajectory*> by_rank(const SensitivityReport& report,
                                             const std::map<std::string, int>& ranks) {
  std::vector<const MethodTrajectory*> order;
  order.reserve(report.trajectories.size());
  for (const MethodTrajectory& t : report.trajectories) order.push_back(&t);
  std::sort(order.begin(), order.end(), [&](const MethodTrajectory* a, const MethodTrajectory* b) {
    return ranks.at(a->method_id) < ranks.at(b->method_id);
  });
  return order;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

std::string report_to_json(const SensitivityReport& report) {
  json j;
  j["config"] = config_to_json(report.config);
  j["trajectories"] = json::array();
  for (const MethodTrajectory& t : report.trajectories) {
    json jt;
    jt["method_id"] = t.method_id;
    jt["points"] = json::array();
    for (const TrajectoryPoint& p : t.points) {
      jt["points"].push_back({{"fraction", p.fraction},
                              {"mean_r2", num_or_null(p.ok ? p.mean_r2 : kNan)},
                              {"fold_std", num_or_null(p.ok ? p.fold_std : kNan)},
                              {"ok", p.ok},
                              {"error", p.error}});
    }
    jt["slope"] = num_or_null(t.slope);
    jt["intercept"] = num_or_null(t.intercept);
    jt["fluctuation"] = num_or_null(t.fluctuation);
    jt["mean_r2_overall"] = num_or_null(t.mean_r2_overall);
    jt["mean_r2_full"] = num_or_null(t.mean_r2_full);
    jt["error_cells"] = t.error_cells;
    jt["stats_ok"] = t.stats_ok;
    j["trajectories"].push_back(std::move(jt));
  }
  j["rank_by_mean_r2"] = report.rank_by_mean_r2;
  j["rank_by_abs_slope"] = report.rank_by_abs_slope;
  j["rank_by_fluctuation"] = report.rank_by_fluctuation;
  j["composite_rank"] = report.composite_rank;
  return j.dump(2) + "\n";
}

SensitivityReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("report.json parse error: ") + e.what());
  }
  // Only config, method ids and points are required; derived statistics and
  // ranks can always be recomputed with finalize_statistics, so a hand-edited
  // trajectories-only file is acceptable input.
  try {
    SensitivityReport report;
    report.config = config_from_json(j.at("config"));
    const auto opt_num = [](const json& jt, const char* key) {
      return jt.contains(key) ? num_from(jt.at(key)) : kNan;
    };
    for (const json& jt : j.at("trajectories")) {
      MethodTrajectory t;
      t.method_id = jt.at("method_id").get<std::string>();
      for (const json& jp : jt.at("points")) {
        TrajectoryPoint p;
        p.fraction = jp.at("fraction").get<double>();
        p.mean_r2 = num_from(jp.at("mean_r2"));
        p.ok = jp.contains("ok") ? jp.at("ok").get<bool>() : !std::isnan(p.mean_r2);
        const double fs = jp.contains("fold_std") ? num_from(jp.at("fold_std")) : kNan;
        p.fold_std = std::isnan(fs) ? 0.0 : fs;
        p.error = jp.contains("error") ? jp.at("error").get<std::string>() : "";
        t.points.push_back(std::move(p));
      }
      t.slope = opt_num(jt, "slope");
      t.intercept = opt_num(jt, "intercept");
      t.fluctuation = opt_num(jt, "fluctuation");
      t.mean_r2_overall = opt_num(jt, "mean_r2_overall");
      t.mean_r2_full = opt_num(jt, "mean_r2_full");
      t.error_cells = jt.contains("error_cells") ? jt.at("error_cells").get<int>() : 0;
      t.stats_ok = jt.contains("stats_ok") ? jt.at("stats_ok").get<bool>() : false;
      report.trajectories.push_back(std::move(t));
    }
    const auto opt_ranks = [&](const char* key) {
      return j.contains(key) ? j.at(key).get<std::map<std::string, int>>()
                             : std::map<std::string, int>{};
    };
    report.rank_by_mean_r2 = opt_ranks("rank_by_mean_r2");
    report.rank_by_abs_slope = opt_ranks("rank_by_abs_slope");
    report.rank_by_fluctuation = opt_ranks("rank_by_fluctuation");
    report.composite_rank = opt_ranks("composite_rank");
    return report;
  } catch (const json::exception& e) {
    throw DataError(std::string("report.json schema error: ") + e.what());
  }
}

bool reports_equal(const SensitivityReport& a, const SensitivityReport& b) {
  if (a.trajectories.size() != b.trajectories.size()) return false;
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    const MethodTrajectory& x = a.trajectories[i];
    const MethodTrajectory& y = b.trajectories[i];
    if (x.method_id != y.method_id || x.points.size() != y.points.size()) return false;
    if (x.error_cells != y.error_cells || x.stats_ok != y.stats_ok) return false;
    if (!same_number(x.slope, y.slope) || !same_number(x.intercept, y.intercept) ||
        !same_number(x.fluctuation, y.fluctuation) ||
        !same_number(x.mean_r2_overall, y.mean_r2_overall) ||
        !same_number(x.mean_r2_full, y.mean_r2_full)) {
      return false;
    }
    for (std::size_t p = 0; p < x.points.size(); ++p) {
      const TrajectoryPoint& u = x.points[p];
      const TrajectoryPoint& v = y.points[p];
      if (u.fraction != v.fraction || u.ok != v.ok || u.error != v.error) return false;
      if (u.ok && (!same_number(u.mean_r2, v.mean_r2) || !same_number(u.fold_std, v.fold_std))) {
        return false;
      }
    }
  }
  return a.rank_by_mean_r2 == b.rank_by_mean_r2 && a.rank_by_abs_slope == b.rank_by_abs_slope &&
         a.rank_by_fluctuation == b.rank_by_fluctuation &&
         a.composite_rank == b.composite_rank &&
         config_to_json(a.config) == config_to_json(b.config);
}

void emit_report(const SensitivityReport& report, const std::filesystem::path& out_dir,
                 const EmitOptions& options) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::create_directories(out_dir / "charts");
  const std::string comment = config_comment(report);

  // report.json — the contract everything else can be re-rendered from
  write_file(out_dir / "report.json", report_to_json(report));

  // trajectories.csv
  {
    std::ostringstream csv;
    csv << "# " << comment << "\n";
    csv << "method,fraction,mean_r2,fold_std\n";
    for (const MethodTrajectory& t : report.trajectories) {
      for (const TrajectoryPoint& p : t.points) {
        csv << t.method_id << ',' << fixed2(p.fraction) << ','
            << (p.ok ? fixed6(p.mean_r2) : "") << ',' << (p.ok ? fixed6(p.fold_std) : "") << "\n";
      }
    }
    write_file(out_dir / "trajectories.csv", csv.str());
  }

  // summary.csv, ordered by mean-R^2 rank
  {
    std::ostringstream csv;
    csv << "# " << comment << "\n";
    csv << "method,mean_r2,full_data_r2,slope,fluctuation,rank_mean_r2,rank_abs_slope,"
           "rank_fluctuation,composite_rank\n";
    for (const MethodTrajectory* t : by_rank(report, report.rank_by_mean_r2)) {
      csv << t->method_id << ',' << fixed6(t->mean_r2_overall) << ',' << fixed6(t->mean_r2_full)
          << ',' << fixed6(t->slope) << ',' << fixed6(t->fluctuation) << ','
          << report.rank_by_mean_r2.at(t->method_id) << ','
          << report.rank_by_abs_slope.at(t->method_id) << ','
          << report.rank_by_fluctuation.at(t->method_id) << ','
          << report.composite_rank.at(t->method_id) << "\n";
    }
    write_file(out_dir / "summary.csv", csv.str());
  }

  // report.md
  {
    std::ostringstream md;
    md << "# Shrink-sensitivity benchmark report\n\n";
    if (!options.no_timestamp) {
      const std::time_t now = std::time(nullptr);
      char buf[32];
      std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      md << "Generated: " << buf << "\n\n";
    }
    md << "## Configuration\n\n";
    md << "```json\n" << config_to_json(report.config).dump(2) << "\n```\n\n";
    md << "## Method summary (sorted by mean R²)\n\n";
    md << "| method | mean R² | full-data R² | slope | fluctuation | rank R² | "
          "rank |slope| | rank fluct | composite |\n";
    md << "|---|---|---|---|---|---|---|---|---|\n";
    for (const MethodTrajectory* t : by_rank(report, report.rank_by_mean_r2)) {
      md << "| " << t->method_id << " | " << fixed6(t->mean_r2_overall) << " | "
         << fixed6(t->mean_r2_full) << " | " << fixed6(t->slope) << " | " << fixed6(t->fluctuation)
         << " | " << report.rank_by_mean_r2.at(t->method_id) << " | "
         << report.rank_by_abs_slope.at(t->method_id) << " | "
         << report.rank_by_fluctuation.at(t->method_id) << " | "
         << report.composite_rank.at(t->method_id) << " |\n";
    }
    md << "\n## Notes\n\n";
    md << "- `mean R²` averages the 10-fold CV mean over every retained-fraction step; "
          "`full-data R²` is the fraction-1.00 cell alone (folds-only average).\n";
    md << "- `slope` and `fluctuation` come from the least-squares trend line of mean R² "
          "over retained fraction: slope = sensitivity to data volume, fluctuation = sample std "
          "of the residuals.\n";
    md << "- The method name `edit_distance` is the thresholded edit distance on real sequences "
          "(the same measure the `edr` metric implements).\n";
    int error_cells = 0;
    for (const MethodTrajectory& t : report.trajectories) error_cells += t.error_cells;
    md << "- Error cells (excluded from statistics): " << error_cells << "\n";
    write_file(out_dir / "report.md", md.str());
  }

  // charts: one per populated family plus "all"
  {
    const auto traj_to_series = [](const MethodTrajectory& t) {
      ChartSeries s;
      s.label = t.method_id;
      for (const TrajectoryPoint& p : t.points) {
        if (p.ok) s.points.emplace_back(p.fraction * 100.0, p.mean_r2);
      }
      if (t.stats_ok) {
        s.trend_slope = t.slope;
        s.trend_intercept = t.intercept;
        s.has_trend = true;
      }
      return s;
    };

    const MethodFamily families[] = {MethodFamily::Filter, MethodFamily::Wrapper,
                                     MethodFamily::Embedded, MethodFamily::Similarity};
    for (const MethodFamily family : families) {
      std::vector<ChartSeries> series;
      for (const MethodTrajectory& t : report.trajectories) {
        if (method_family(method_from_string(t.method_id)) == family) {
          series.push_back(traj_to_series(t));
        }
      }
      if (series.empty()) continue;
      const std::string name = to_string(family);
      write_file(out_dir / "charts" / (name + ".svg"),
                 render_line_chart("Mean R² vs retained observations: " + name, series,
                                   comment));
    }
    std::vector<ChartSeries> all;
    for (const MethodTrajectory& t : report.trajectories) all.push_back(traj_to_series(t));
    write_file(out_dir / "charts" / "all.svg",
               render_line_chart("Mean R² vs retained observations: all methods", all,
                                 comment));
  }
}

}  // namespace shrinkbench
