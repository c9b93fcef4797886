#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "shrinkbench/dataset.hpp"

namespace shrinkbench {

// Column-major design matrix: one vector per feature column.
using Columns = std::vector<std::vector<double>>;

// Least-squares fit of y on X plus an (unpenalized) intercept. Columns are
// standardized internally for the solve; ridge_lambda penalizes the
// standardized coefficients and the reported coefficients are mapped back to
// the original scale.
struct OlsModel {
  std::vector<double> coefficients;
  double intercept = 0.0;
  double ridge_lambda = 0.0;
};

struct CvScore {
  std::vector<double> fold_r2;  // NaN marks a degenerate fold (zero target variance)
  double mean_r2 = 0.0;         // mean over non-degenerate folds
  double std_r2 = 0.0;          // sample std over non-degenerate folds
  std::uint64_t seed = 0;
  int degenerate_folds = 0;
};

// The stabilizer used whenever a solve needs more columns than rows or
// reports rank deficiency: 1e-8 * mean column variance * k.
double default_ridge_lambda(const Columns& x);

// Minimizes ||y - X b - intercept||^2 + lambda ||b_std||^2. With lambda == 0 a
// rank-deficient system throws RankDeficientError instructing the caller to
// pass a positive lambda.
OlsModel fit_ols(const Columns& x, std::span<const double> y, double ridge_lambda);

std::vector<double> predict(const OlsModel& model, const Columns& x);

// 1 - SS_res / SS_tot. Throws when SS_tot == 0 (undefined).
double r_squared(std::span<const double> y_true, std::span<const double> y_pred);

// Deterministic fold assignment: Fisher-Yates-shuffled row order (SplitMix64
// seeded with `seed`), split into `folds` near-equal consecutive chunks; the
// first (n mod folds) folds get one extra row. Returns the fold id per row.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

// Randomized k-fold cross validation of OLS restricted to `subset`. Each fold
// is held out once; fits use lambda = 0 and fall back to default_ridge_lambda
// when columns outnumber rows or the solve is rank deficient. A held-out fold
// with zero target variance is recorded as NaN, excluded from the mean and
// counted in degenerate_folds.
CvScore kfold_cv(const AlignedDataset& ds, const std::vector<std::string>& subset, int folds,
                 std::uint64_t seed);

}  // namespace shrinkbench
