#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shrinkbench/dataset.hpp"
#include "shrinkbench/metrics.hpp"

namespace shrinkbench {

// The fifteen default benchmark methods plus three optional extra similarity
// measures. "edit_distance" is the thresholded edit distance on real
// sequences (the edr measure).
enum class MethodId {
  Var,
  Cor,
  MutualInformation,
  Forward,
  Backward,
  Stepwise,
  Rfe,
  Simulated,
  Lasso,
  TreeBase,
  Eu,
  Dtw,
  Hausdorff,
  Frechet,
  EditDistance,
  Lcss,
  Erp,
  Sspd,
};

std::string to_string(MethodId id);
MethodId method_from_string(std::string_view s);
// The fifteen methods benchmarked by default (excludes lcss/erp/sspd).
std::vector<MethodId> default_methods();

enum class MethodFamily { Filter, Wrapper, Embedded, Similarity };
MethodFamily method_family(MethodId id);
std::string to_string(MethodFamily family);

struct SaParams {
  double t0 = 0.01;
  double alpha = 0.95;
  int iters = 200;
};

struct LassoParams {
  int path_len = 50;
  double tol = 1e-6;
  int max_sweeps = 1000;
};

struct ForestParams {
  int trees = 100;
  int max_depth = 8;
  int min_leaf = 5;
};

struct SelectorSpec {
  MethodId method_id = MethodId::Var;
  int k = 10;                 // subset size every method returns
  std::uint64_t seed = 0;
  MetricParams metric_params{};
  int wrapper_prescreen = 50; // top-P |correlation| pool fed to wrappers
  SaParams sa_params{};
  LassoParams lasso_params{};
  ForestParams forest_params{};

  void validate(std::size_t n_features) const;
};

// `selected` is always the top-k of `scores` (one score per dataset column,
// higher preferred, distances negated) under the deterministic tie-break of
// lexicographically smaller column id first. Score scales are method-specific
// and not comparable across methods; search methods encode their chosen
// ranking as integer scores.
struct SelectionResult {
  MethodId method_id = MethodId::Var;
  std::vector<std::string> selected;
  std::vector<double> scores;
  std::map<std::string, std::string> diagnostics;
};

// Dispatches on spec.method_id; deterministic given spec.seed.
SelectionResult select(const AlignedDataset& ds, const SelectorSpec& spec);

SelectionResult filter_variance(const AlignedDataset& ds, int k);
SelectionResult filter_correlation(const AlignedDataset& ds, int k);
SelectionResult filter_mutual_information(const AlignedDataset& ds, int k);
SelectionResult wrapper_forward(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult wrapper_backward(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult wrapper_stepwise(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult wrapper_rfe(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult wrapper_simulated_annealing(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult embedded_lasso(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult embedded_tree_importance(const AlignedDataset& ds, const SelectorSpec& spec);
SelectionResult similarity_select(const AlignedDataset& ds, const SelectorSpec& spec);

// Histogram mutual information in nats with B = ceil(sqrt(N)) equal-frequency
// bins on both sides; exposed for the selector and its tests.
double histogram_mutual_information(std::span<const double> x, std::span<const double> y);

// The wrappers' candidate pool: indices of the top-P columns by |Pearson r|
// against y, ranked descending with lexicographic id tie-break.
std::vector<std::size_t> prescreen_pool(const AlignedDataset& ds, int p);

// The wrappers' shared objective: 10-fold CV mean R-squared of OLS on a
// subset of the pool, with the fold assignment fixed once at construction so
// every candidate subset is scored against identical folds. Computed from
// per-fold moment sums; agrees with kfold_cv to floating-point noise.
class PooledCvObjective {
 public:
  PooledCvObjective(const AlignedDataset& ds, std::vector<std::size_t> pool, int folds,
                    std::uint64_t seed);
  ~PooledCvObjective();
  PooledCvObjective(PooledCvObjective&&) noexcept;
  PooledCvObjective& operator=(PooledCvObjective&&) noexcept;

  // `subset` holds indices into pool(). NaN when every fold is degenerate.
  double mean_r2(std::span<const std::size_t> subset) const;
  const std::vector<std::size_t>& pool() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One pass of cyclic coordinate descent lasso at a fixed lambda on
// pre-standardized columns and centered y (objective (1/2N)||y - Xb||^2 +
// lambda ||b||_1). Returns the in/out coefficient vector's sweep count and
// convergence flag; exposed for the selector and its oracle tests.
struct LassoFitInfo {
  int sweeps = 0;
  bool converged = false;
};
LassoFitInfo lasso_coordinate_descent(const std::vector<std::vector<double>>& x_std,
                                      const std::vector<double>& y_centered, double lambda,
                                      double tol, int max_sweeps, std::vector<double>& beta);

}  // namespace shrinkbench
