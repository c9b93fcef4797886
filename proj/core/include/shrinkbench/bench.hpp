#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "shrinkbench/dataset.hpp"
#include "shrinkbench/selectors.hpp"

namespace shrinkbench {

enum class ShrinkPolicy { Suffix, Prefix, Random };

std::string to_string(ShrinkPolicy policy);
ShrinkPolicy shrink_policy_from_string(std::string_view s);

// Descending retained-data fractions, 1.00 first, never below 0.20.
struct ShrinkSchedule {
  std::vector<double> fractions;
  ShrinkPolicy row_policy = ShrinkPolicy::Suffix;

  void validate() const;

  // 1.00 down to 0.20 in 1-point steps: 81 evaluation points.
  static ShrinkSchedule full();
  // 1.00 down to min_pct in step_pct-point steps (the 5-point desk default
  // gives 17 points).
  static ShrinkSchedule stepped(int step_pct, int min_pct = 20);
};

// Keeps ceil(fraction * N) rows: the most recent ones under Suffix, the
// earliest under Prefix, a seeded sorted sample under Random. Errors when
// fewer than 20 rows (two per fold of a 10-fold CV) would remain.
AlignedDataset shrink(const AlignedDataset& ds, double fraction,
                      ShrinkPolicy policy = ShrinkPolicy::Suffix, std::uint64_t seed = 0);

struct TrajectoryPoint {
  double fraction = 0.0;
  double mean_r2 = 0.0;  // NaN for an error cell
  double fold_std = 0.0;
  bool ok = false;
  std::string error;  // empty unless the cell failed
};

struct TrendStats {
  double slope = 0.0;
  double intercept = 0.0;
  double fluctuation = 0.0;
};

// Least-squares line of r2 on fraction plus the sample std of the residuals.
// Needs at least 3 points.
TrendStats trend_stats(const std::vector<std::pair<double, double>>& points);

struct MethodTrajectory {
  std::string method_id;
  std::vector<TrajectoryPoint> points;  // one per schedule fraction
  double slope = 0.0;
  double intercept = 0.0;
  double fluctuation = 0.0;
  double mean_r2_overall = 0.0;  // mean over valid cells (folds x steps reading)
  double mean_r2_full = 0.0;     // the fraction-1.0 cell (folds-only reading)
  int error_cells = 0;
  bool stats_ok = false;  // false when < 3 valid points
};

// Everything needed to reproduce a run; embedded in every emitted output.
struct BenchConfig {
  std::uint64_t seed = 0;
  std::string target_id;
  int horizon = 0;
  ShrinkSchedule schedule;
  std::vector<SelectorSpec> methods;
  std::map<std::string, std::string> extras;  // source description etc.
};

struct SensitivityReport {
  std::vector<MethodTrajectory> trajectories;
  std::map<std::string, int> rank_by_mean_r2;      // descending mean R^2
  std::map<std::string, int> rank_by_abs_slope;    // ascending |slope|
  std::map<std::string, int> rank_by_fluctuation;  // ascending fluctuation
  std::map<std::string, int> composite_rank;       // ascending sum of the three
  BenchConfig config;
};

// Ranks are permutations 1..n with lexicographic method-id tie-break; methods
// whose statistics are unavailable rank last.
void rank_methods(SensitivityReport& report);

// Recomputes every per-trajectory statistic (trend, means, error cells) from
// the stored points and refreshes the ranks. run_benchmark ends with this, and
// re-rendering a report from JSON goes through the same path, so derived
// numbers are identical either way.
void finalize_statistics(SensitivityReport& report);

// The core experiment: for every (method, fraction) cell, shrink, re-select
// on the shrunk data, and score the selected subset with 10-fold CV. Each
// cell derives its own seeds from (seed, method_id, fraction), so the grid is
// order-independent and embarrassingly parallel. A failing cell is recorded,
// excluded from that method's statistics, and does not abort the run.
// threads <= 0 means automatic (SHRINKBENCH_THREADS env var, then hardware).
SensitivityReport run_benchmark(const AlignedDataset& ds, const std::vector<SelectorSpec>& methods,
                                const ShrinkSchedule& schedule, std::uint64_t seed,
                                int threads = 0);

int resolve_threads(int requested);

// The per-cell seed derivation run_benchmark uses, exposed so any single cell
// can be reproduced in isolation: .first seeds the selector, .second the CV.
struct CellSeeds {
  std::uint64_t selector;
  std::uint64_t cv;
};
CellSeeds bench_cell_seeds(std::uint64_t master, MethodId method, double fraction);

// Seed for the (fraction-only) shrink row sample under the Random policy.
std::uint64_t bench_shrink_seed(std::uint64_t master, double fraction);

}  // namespace shrinkbench
