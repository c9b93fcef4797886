#include "shrinkbench/regression.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/rng.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kRankTol = 1e-10;

void check_design(const Columns& x, std::span<const double> y) {
  if (x.empty()) throw ValidationError("ols: no feature columns");
  if (y.size() < 2) throw ValidationError("ols: needs at least 2 rows");
  for (const auto& col : x) {
    if (col.size() != y.size()) throw ValidationError("ols: column length mismatch");
    if (!all_finite(col)) throw ValidationError("ols: non-finite feature value");
  }
  if (!all_finite(y)) throw ValidationError("ols: non-finite target value");
}

}  // namespace

double default_ridge_lambda(const Columns& x) {
  // 1e-8 * mean column variance * k, with the variance taken over the columns
  // the solver actually sees: standardized, so every non-constant column has
  // variance exactly 1 and every constant column has variance 0. This keeps
  // the stabilizer scale-free (prices and share volumes differ by ~1e6).
  if (x.empty()) return 0.0;
  double mean_var = 0.0;
  for (const auto& col : x) {
    if (sample_variance(col) > 0.0) mean_var += 1.0;
  }
  mean_var /= static_cast<double>(x.size());
  return 1e-8 * mean_var * static_cast<double>(x.size());
}

OlsModel fit_ols(const Columns& x, std::span<const double> y, double ridge_lambda) {
  check_design(x, y);
  if (ridge_lambda < 0.0) throw ValidationError("ols: negative ridge_lambda");
  const std::size_t n = y.size();
  const std::size_t k = x.size();

  Eigen::MatrixXd xs(n, k);  // standardized columns; constant columns become zero
  std::vector<double> mu(k), sigma(k);
  for (std::size_t j = 0; j < k; ++j) {
    mu[j] = mean(x[j]);
    sigma[j] = sample_std(x[j]);
    for (std::size_t i = 0; i < n; ++i) {
      xs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          sigma[j] > 0.0 ? (x[j][i] - mu[j]) / sigma[j] : 0.0;
    }
  }
  const double y_mean = mean(y);
  Eigen::VectorXd yc(n);
  for (std::size_t i = 0; i < n; ++i) yc(static_cast<Eigen::Index>(i)) = y[i] - y_mean;

  Eigen::MatrixXd gram = xs.transpose() * xs;
  gram.diagonal().array() += ridge_lambda;
  const Eigen::VectorXd rhs = xs.transpose() * yc;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  bool deficient = ldlt.info() != Eigen::Success;
  if (!deficient) {
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    if (!(dmax > 0.0) || d.minCoeff() < kRankTol * dmax) deficient = true;
  }
  if (deficient && ridge_lambda == 0.0) {
    throw RankDeficientError(
        "ols: rank-deficient design with ridge_lambda == 0; pass a positive lambda "
        "(e.g. default_ridge_lambda)");
  }
  Eigen::VectorXd beta_std;
  if (deficient) {
    // lambda > 0 but the system is still numerically singular; fall back to a
    // minimum-norm least-squares solve of the regularized system.
    beta_std = gram.completeOrthogonalDecomposition().solve(rhs);
  } else {
    beta_std = ldlt.solve(rhs);
  }

  OlsModel model;
  model.ridge_lambda = ridge_lambda;
  model.coefficients.resize(k);
  double shift = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const double b = sigma[j] > 0.0 ? beta_std(static_cast<Eigen::Index>(j)) / sigma[j] : 0.0;
    model.coefficients[j] = b;
    shift += b * mu[j];
  }
  model.intercept = y_mean - shift;
  if (!all_finite(model.coefficients) || !std::isfinite(model.intercept)) {
    throw ValidationError("ols: solve produced non-finite coefficients");
  }
  return model;
}

std::vector<double> predict(const OlsModel& model, const Columns& x) {
  if (x.size() != model.coefficients.size()) {
    throw ValidationError("predict: column count does not match coefficient count");
  }
  if (x.empty()) throw ValidationError("predict: no feature columns");
  const std::size_t n = x.front().size();
  for (const auto& col : x) {
    if (col.size() != n) throw ValidationError("predict: column length mismatch");
  }
  std::vector<double> out(n, model.intercept);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double b = model.coefficients[j];
    for (std::size_t i = 0; i < n; ++i) out[i] += b * x[j][i];
  }
  return out;
}

double r_squared(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw ValidationError("r_squared: length mismatch or empty input");
  }
  const double m = mean(y_true);
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double dt = y_true[i] - m;
    const double dr = y_true[i] - y_pred[i];
    ss_tot += dt * dt;
    ss_res += dr * dr;
  }
  if (ss_tot == 0.0) throw ValidationError("r_squared: zero target variance");
  return 1.0 - ss_res / ss_tot;
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw ValidationError("fold_assignment: folds must be >= 2");
  if (n < static_cast<std::size_t>(folds)) {
    throw ValidationError("fold_assignment: fewer rows than folds");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  SplitMix64 rng(seed);
  fisher_yates_shuffle(order, rng);

  std::vector<int> fold_of(n, 0);
  const std::size_t base = n / static_cast<std::size_t>(folds);
  const std::size_t rem = n % static_cast<std::size_t>(folds);
  std::size_t pos = 0;
  for (int f = 0; f < folds; ++f) {
    const std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) fold_of[order[pos++]] = f;
  }
  return fold_of;
}

CvScore kfold_cv(const AlignedDataset& ds, const std::vector<std::string>& subset, int folds,
                 std::uint64_t seed) {
  if (subset.empty()) throw ValidationError("kfold_cv: empty feature subset");
  const std::size_t n = ds.n_rows();
  if (folds < 2) throw ValidationError("kfold_cv: folds must be >= 2");
  if (n < static_cast<std::size_t>(folds)) throw ValidationError("kfold_cv: fewer rows than folds");

  std::vector<const std::vector<double>*> cols;
  cols.reserve(subset.size());
  for (const std::string& id : subset) {
    const auto idx = ds.features().column_index(id);
    if (!idx) throw ValidationError("kfold_cv: unknown feature '" + id + "'");
    cols.push_back(&ds.features().column(*idx));
  }

  const std::vector<int> fold_of = fold_assignment(n, folds, seed);
  CvScore score;
  score.seed = seed;
  score.fold_r2.assign(static_cast<std::size_t>(folds), kNan);

  for (int f = 0; f < folds; ++f) {
    Columns x_train(cols.size());
    Columns x_test(cols.size());
    std::vector<double> y_train, y_test;
    for (std::size_t i = 0; i < n; ++i) {
      const bool held_out = fold_of[i] == f;
      for (std::size_t j = 0; j < cols.size(); ++j) {
        (held_out ? x_test[j] : x_train[j]).push_back((*cols[j])[i]);
      }
      (held_out ? y_test : y_train).push_back(ds.y()[i]);
    }

    if (sample_variance(y_test) == 0.0) {
      ++score.degenerate_folds;
      continue;
    }

    OlsModel model;
    if (cols.size() >= y_train.size()) {
      model = fit_ols(x_train, y_train, default_ridge_lambda(x_train));
    } else {
      try {
        model = fit_ols(x_train, y_train, 0.0);
      } catch (const RankDeficientError&) {
        model = fit_ols(x_train, y_train, default_ridge_lambda(x_train));
      }
    }
    score.fold_r2[static_cast<std::size_t>(f)] = r_squared(y_test, predict(model, x_test));
  }

  double total = 0.0;
  std::vector<double> valid;
  valid.reserve(score.fold_r2.size());
  for (const double r : score.fold_r2) {
    if (!std::isnan(r)) {
      total += r;
      valid.push_back(r);
    }
  }
  score.mean_r2 = valid.empty() ? kNan : total / static_cast<double>(valid.size());
  score.std_r2 = valid.size() > 1 ? sample_std(valid) : 0.0;
  return score;
}

}  // namespace shrinkbench
