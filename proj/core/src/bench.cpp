#include "shrinkbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <numeric>
#include <thread>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/regression.hpp"
#include "shrinkbench/rng.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMinRows = 20;  // two rows per fold of a 10-fold CV

std::uint64_t fraction_key(double fraction) {
  return static_cast<std::uint64_t>(std::llround(fraction * 1e6));
}

}  // namespace

CellSeeds bench_cell_seeds(std::uint64_t master, MethodId method, double fraction) {
  const std::uint64_t cell =
      derive_seed(master, fnv1a64(to_string(method)), fraction_key(fraction));
  return {derive_seed(cell, 1), derive_seed(cell, 2)};
}

std::uint64_t bench_shrink_seed(std::uint64_t master, double fraction) {
  return derive_seed(master, fnv1a64("shrink"), fraction_key(fraction));
}

std::string to_string(ShrinkPolicy policy) {
  switch (policy) {
    case ShrinkPolicy::Suffix: return "suffix";
    case ShrinkPolicy::Prefix: return "prefix";
    case ShrinkPolicy::Random: return "random";
  }
  return "unknown";
}

ShrinkPolicy shrink_policy_from_string(std::string_view s) {
  if (s == "suffix") return ShrinkPolicy::Suffix;
  if (s == "prefix") return ShrinkPolicy::Prefix;
  if (s == "random") return ShrinkPolicy::Random;
  throw ValidationError("unknown shrink policy: '" + std::string(s) + "'");
}

void ShrinkSchedule::validate() const {
  if (fractions.empty()) throw ValidationError("schedule: no fractions");
  if (fractions.front() != 1.0) throw ValidationError("schedule: must start at 1.00");
  for (std::size_t i = 1; i < fractions.size(); ++i) {
    if (!(fractions[i] < fractions[i - 1])) {
      throw ValidationError("schedule: fractions must be strictly decreasing");
    }
  }
  if (fractions.back() < 0.2 - 1e-12) {
    throw ValidationError("schedule: fractions must stay >= 0.20");
  }
}

ShrinkSchedule ShrinkSchedule::full() { return stepped(1); }

ShrinkSchedule ShrinkSchedule::stepped(int step_pct, int min_pct) {
  if (step_pct < 1 || min_pct < 20 || min_pct > 100) {
    throw ValidationError("schedule: step must be >= 1 and min percent in [20, 100]");
  }
  ShrinkSchedule s;
  for (int pct = 100; pct >= min_pct; pct -= step_pct) {
    s.fractions.push_back(static_cast<double>(pct) / 100.0);
  }
  s.validate();
  return s;
}

AlignedDataset shrink(const AlignedDataset& ds, double fraction, ShrinkPolicy policy,
                      std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ValidationError("shrink: fraction must be in (0, 1]");
  }
  const std::size_t n = ds.n_rows();
  // Guarded ceil: products like 0.2 * 100 land a hair above the integer.
  const auto kept = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(n) - 1e-9));
  if (kept >= n) return ds;
  if (kept < kMinRows) {
    throw ValidationError("shrink: fraction " + std::to_string(fraction) + " leaves " +
                          std::to_string(kept) + " rows; fewer than " + std::to_string(kMinRows) +
                          " cannot support 10-fold CV");
  }

  std::vector<std::size_t> rows;
  rows.reserve(kept);
  switch (policy) {
    case ShrinkPolicy::Suffix:
      for (std::size_t i = n - kept; i < n; ++i) rows.push_back(i);
      break;
    case ShrinkPolicy::Prefix:
      for (std::size_t i = 0; i < kept; ++i) rows.push_back(i);
      break;
    case ShrinkPolicy::Random: {
      std::vector<std::size_t> all(n);
      std::iota(all.begin(), all.end(), std::size_t{0});
      SplitMix64 rng(seed);
      for (std::size_t i = 0; i < kept; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
        std::swap(all[i], all[j]);
      }
      rows.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kept));
      std::sort(rows.begin(), rows.end());
      break;
    }
  }

  std::vector<double> y;
  y.reserve(kept);
  for (const std::size_t r : rows) y.push_back(ds.y()[r]);
  return AlignedDataset(ds.features().take_rows(rows), ds.target_id(), std::move(y),
                        ds.horizon());
}

TrendStats trend_stats(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw ValidationError("trend_stats: needs at least 3 points");
  const double n = static_cast<double>(points.size());

  // A constant trajectory is its own trend line; returning exactly zero keeps
  // the flat case from picking up summation noise.
  bool constant = true;
  for (const auto& [f, r] : points) {
    (void)f;
    if (r != points.front().second) constant = false;
  }
  if (constant) return {0.0, points.front().second, 0.0};

  double mf = 0.0, mr = 0.0;
  for (const auto& [f, r] : points) {
    mf += f;
    mr += r;
  }
  mf /= n;
  mr /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [f, r] : points) {
    sxx += (f - mf) * (f - mf);
    sxy += (f - mf) * (r - mr);
  }
  if (sxx == 0.0) throw ValidationError("trend_stats: all fractions identical");

  TrendStats t;
  t.slope = sxy / sxx;
  t.intercept = mr - t.slope * mf;
  std::vector<double> residuals;
  residuals.reserve(points.size());
  for (const auto& [f, r] : points) {
    residuals.push_back(r - (t.intercept + t.slope * f));
  }
  t.fluctuation = sample_std(residuals);
  return t;
}

void rank_methods(SensitivityReport& report) {
  struct Entry {
    std::string id;
    double value;
  };
  const auto rank_of = [&](auto value_of, bool ascending) {
    std::vector<Entry> entries;
    entries.reserve(report.trajectories.size());
    for (const MethodTrajectory& t : report.trajectories) {
      double v = value_of(t);
      if (std::isnan(v)) {
        v = ascending ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
      }
      entries.push_back({t.method_id, v});
    }
    std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
      if (a.value != b.value) return ascending ? a.value < b.value : a.value > b.value;
      return a.id < b.id;
    });
    std::map<std::string, int> ranks;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      ranks[entries[i].id] = static_cast<int>(i + 1);
    }
    return ranks;
  };

  report.rank_by_mean_r2 = rank_of(
      [](const MethodTrajectory& t) { return t.stats_ok ? t.mean_r2_overall : kNan; }, false);
  report.rank_by_abs_slope = rank_of(
      [](const MethodTrajectory& t) { return t.stats_ok ? std::abs(t.slope) : kNan; }, true);
  report.rank_by_fluctuation = rank_of(
      [](const MethodTrajectory& t) { return t.stats_ok ? t.fluctuation : kNan; }, true);

  std::vector<Entry> sums;
  sums.reserve(report.trajectories.size());
  for (const MethodTrajectory& t : report.trajectories) {
    const double s = static_cast<double>(report.rank_by_mean_r2.at(t.method_id) +
                                         report.rank_by_abs_slope.at(t.method_id) +
                                         report.rank_by_fluctuation.at(t.method_id));
    sums.push_back({t.method_id, s});
  }
  std::sort(sums.begin(), sums.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value < b.value;
    return a.id < b.id;
  });
  report.composite_rank.clear();
  for (std::size_t i = 0; i < sums.size(); ++i) {
    report.composite_rank[sums[i].id] = static_cast<int>(i + 1);
  }
}

int resolve_threads(int requested) {
  if (const char* env = std::getenv("SHRINKBENCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

SensitivityReport run_benchmark(const AlignedDataset& ds, const std::vector<SelectorSpec>& methods,
                                const ShrinkSchedule& schedule, std::uint64_t seed, int threads) {
  if (methods.empty()) throw ValidationError("benchmark: no methods");
  schedule.validate();
  for (const SelectorSpec& spec : methods) spec.validate(ds.features().n_cols());
  {
    std::vector<std::string> ids;
    ids.reserve(methods.size());
    for (const SelectorSpec& m : methods) ids.push_back(to_string(m.method_id));
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
      throw ValidationError("benchmark: duplicate method id");
    }
  }

  const std::size_t n_methods = methods.size();
  const std::size_t n_fracs = schedule.fractions.size();

  // Shrink once per fraction; every method sees the same shrunk data.
  struct Shrunk {
    std::unique_ptr<AlignedDataset> ds;
    std::string error;
  };
  std::vector<Shrunk> shrunk(n_fracs);
  for (std::size_t fi = 0; fi < n_fracs; ++fi) {
    const double f = schedule.fractions[fi];
    try {
      shrunk[fi].ds = std::make_unique<AlignedDataset>(
          shrink(ds, f, schedule.row_policy, bench_shrink_seed(seed, f)));
    } catch (const Error& e) {
      shrunk[fi].error = e.what();
    }
  }

  std::vector<TrajectoryPoint> cells(n_methods * n_fracs);
  const auto run_cell = [&](std::size_t mi, std::size_t fi) {
    TrajectoryPoint& cell = cells[mi * n_fracs + fi];
    cell.fraction = schedule.fractions[fi];
    cell.mean_r2 = kNan;
    if (!shrunk[fi].ds) {
      cell.error = shrunk[fi].error;
      return;
    }
    const CellSeeds seeds =
        bench_cell_seeds(seed, methods[mi].method_id, schedule.fractions[fi]);
    try {
      SelectorSpec spec = methods[mi];
      spec.seed = seeds.selector;
      const SelectionResult sel = select(*shrunk[fi].ds, spec);
      const CvScore cv = kfold_cv(*shrunk[fi].ds, sel.selected, 10, seeds.cv);
      if (std::isnan(cv.mean_r2)) {
        cell.error = "all CV folds degenerate";
        return;
      }
      cell.mean_r2 = cv.mean_r2;
      cell.fold_std = cv.std_r2;
      cell.ok = true;
    } catch (const Error& e) {
      cell.error = e.what();
    }
  };

  const int n_threads = std::min<int>(resolve_threads(threads),
                                      static_cast<int>(n_methods * n_fracs));
  if (n_threads <= 1) {
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      for (std::size_t fi = 0; fi < n_fracs; ++fi) run_cell(mi, fi);
    }
  } else {
    std::atomic<std::size_t> next{0};
    const std::size_t total = n_methods * n_fracs;
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
          run_cell(i / n_fracs, i % n_fracs);
        }
      });
    }
    for (std::thread& w : workers) w.join();
  }

  SensitivityReport report;
  report.config.seed = seed;
  report.config.target_id = ds.target_id();
  report.config.horizon = ds.horizon();
  report.config.schedule = schedule;
  report.config.methods = methods;

  report.trajectories.reserve(n_methods);
  for (std::size_t mi = 0; mi < n_methods; ++mi) {
    MethodTrajectory traj;
    traj.method_id = to_string(methods[mi].method_id);
    traj.points.assign(cells.begin() + static_cast<std::ptrdiff_t>(mi * n_fracs),
                       cells.begin() + static_cast<std::ptrdiff_t>((mi + 1) * n_fracs));
    report.trajectories.push_back(std::move(traj));
  }

  finalize_statistics(report);
  return report;
}

void finalize_statistics(SensitivityReport& report) {
  for (MethodTrajectory& traj : report.trajectories) {
    traj.error_cells = 0;
    traj.mean_r2_full = kNan;
    std::vector<std::pair<double, double>> valid;
    double total_r2 = 0.0;
    for (const TrajectoryPoint& pt : traj.points) {
      if (!pt.ok) {
        ++traj.error_cells;
        continue;
      }
      valid.emplace_back(pt.fraction, pt.mean_r2);
      total_r2 += pt.mean_r2;
      if (pt.fraction == 1.0) traj.mean_r2_full = pt.mean_r2;
    }
    traj.mean_r2_overall = valid.empty() ? kNan : total_r2 / static_cast<double>(valid.size());
    if (valid.size() >= 3) {
      const TrendStats t = trend_stats(valid);
      traj.slope = t.slope;
      traj.intercept = t.intercept;
      traj.fluctuation = t.fluctuation;
      traj.stats_ok = true;
    } else {
      traj.slope = traj.intercept = traj.fluctuation = kNan;
      traj.stats_ok = false;
    }
  }
  rank_methods(report);
}

}  // namespace shrinkbench
