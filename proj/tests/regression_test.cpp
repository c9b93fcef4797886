#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "shrinkbench/errors.hpp"
#include "shrinkbench/regression.hpp"
#include "shrinkbench/stats.hpp"
#include "testutil.hpp"

using namespace shrinkbench;
using testutil::make_dataset;

TEST_SUITE("regression") {

TEST_CASE("fit_ols recovers exact linear data") {
  const std::vector<double> x = {0, 1, 2, 3, 4, 5};
  std::vector<double> y;
  for (const double v : x) y.push_back(3.0 * v + 2.0);
  const OlsModel m = fit_ols({x}, y, 0.0);
  CHECK(m.coefficients[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(m.intercept == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("fit_ols on a constant target") {
  const std::vector<double> x = {0, 1, 2, 3};
  const std::vector<double> y = {7, 7, 7, 7};
  const OlsModel m = fit_ols({x}, y, 0.0);
  CHECK(m.coefficients[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(m.intercept == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("fit_ols matches the normal-equations oracle on seeded problems") {
  SplitMix64 rng(100);
  for (int rep = 0; rep < 20; ++rep) {
    Columns x;
    for (int j = 0; j < 3; ++j) x.push_back(testutil::gaussian_vector(rng, 50, 1.0, 2.0));
    std::vector<double> y = testutil::gaussian_vector(rng, 50);
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += 0.5 * x[0][i] - 1.5 * x[1][i] + 0.25 * x[2][i];
    }
    const OlsModel m = fit_ols(x, y, 0.0);
    const oracles::OlsSolution ref = oracles::ols_normal_equations(x, y);
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(m.coefficients[static_cast<std::size_t>(j)] -
                     ref.beta[static_cast<std::size_t>(j)]) < 1e-8);
    }
    CHECK(std::abs(m.intercept - ref.intercept) < 1e-8);
  }
}

TEST_CASE("fit_ols residuals are orthogonal to the design") {
  SplitMix64 rng(200);
  Columns x;
  for (int j = 0; j < 4; ++j) x.push_back(testutil::gaussian_vector(rng, 80));
  const std::vector<double> y = testutil::gaussian_vector(rng, 80);
  const OlsModel m = fit_ols(x, y, 0.0);
  const std::vector<double> pred = predict(m, x);
  std::vector<double> resid(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) resid[i] = y[i] - pred[i];

  const double ym = mean(y);
  double y_norm = 0.0;
  for (const double v : y) y_norm += (v - ym) * (v - ym);
  for (const auto& col : x) {
    const double cm = mean(col);
    double dot = 0.0, col_norm = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      dot += (col[i] - cm) * resid[i];
      col_norm += (col[i] - cm) * (col[i] - cm);
    }
    CHECK(std::abs(dot) <= 1e-6 * std::sqrt(col_norm * y_norm) + 1e-12);
  }
}

TEST_CASE("fit_ols rank deficiency") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  SUBCASE("duplicate columns with lambda 0 throw") {
    CHECK_THROWS_AS(fit_ols({x, x}, std::vector<double>{1, 2, 3, 4, 6}, 0.0), RankDeficientError);
  }
  SUBCASE("the default stabilizer resolves it") {
    const Columns design = {x, x};
    const double lambda = default_ridge_lambda(design);
    CHECK(lambda > 0.0);
    const OlsModel m = fit_ols(design, std::vector<double>{1, 2, 3, 4, 6}, lambda);
    CHECK(std::isfinite(m.coefficients[0]));
    // symmetric halves of one effect
    CHECK(m.coefficients[0] == doctest::Approx(m.coefficients[1]).epsilon(1e-6));
  }
  SUBCASE("a constant column is collinear with the intercept") {
    CHECK_THROWS_AS(fit_ols({std::vector<double>{2, 2, 2, 2, 2}},
                            std::vector<double>{1, 2, 3, 4, 6}, 0.0),
                    RankDeficientError);
  }
}

TEST_CASE("predict") {
  OlsModel m;
  m.coefficients = {0.0, 0.0};
  m.intercept = 4.5;
  const Columns x = {{1, 2, 3}, {4, 5, 6}};
  CHECK(predict(m, x) == std::vector<double>{4.5, 4.5, 4.5});

  OlsModel m2;
  m2.coefficients = {2.0, -1.0};
  m2.intercept = 0.5;
  const Columns x2 = {{1, 2}, {3, 4}};
  // hand-expanded dot products
  CHECK(predict(m2, x2) == std::vector<double>{2.0 * 1 - 3.0 + 0.5, 2.0 * 2 - 4.0 + 0.5});

  CHECK_THROWS_AS(predict(m2, Columns{{1, 2}}), ValidationError);
}

TEST_CASE("r_squared") {
  const std::vector<double> y = {1, 2, 3};
  CHECK(r_squared(y, y) == 1.0);
  CHECK(r_squared(y, std::vector<double>{2, 2, 2}) == 0.0);  // mean prediction, exactly
  CHECK(r_squared(y, std::vector<double>{1, 2, 4}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(r_squared(std::vector<double>{5, 5}, std::vector<double>{5, 5}),
                  ValidationError);
  CHECK_THROWS_AS(r_squared(y, std::vector<double>{1, 2}), ValidationError);
}

TEST_CASE("fold assignment matches the independent PRNG reimplementation") {
  CHECK(fold_assignment(8, 2, 99) == oracles::fold_assignment_ref(8, 2, 99));
  CHECK(fold_assignment(103, 10, 7) == oracles::fold_assignment_ref(103, 10, 7));
  CHECK(fold_assignment(20, 3, 0) == oracles::fold_assignment_ref(20, 3, 0));
  SUBCASE("near-equal fold sizes") {
    const auto folds = fold_assignment(103, 10, 7);
    std::vector<int> counts(10, 0);
    for (const int f : folds) ++counts[static_cast<std::size_t>(f)];
    CHECK(std::count(counts.begin(), counts.end(), 11) == 3);
    CHECK(std::count(counts.begin(), counts.end(), 10) == 7);
  }
}

namespace {

AlignedDataset linear_dataset(std::uint64_t seed, std::size_t n) {
  SplitMix64 rng(seed);
  const auto x0 = testutil::gaussian_vector(rng, n, 0.0, 2.0);
  const auto x1 = testutil::gaussian_vector(rng, n, 1.0, 1.0);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = 2.0 * x0[i] - x1[i] + 0.5;
  return make_dataset({"x0", "x1"}, {x0, x1}, y, "x0");
}

}  // namespace

TEST_CASE("kfold_cv is exact on noiseless linear data") {
  const AlignedDataset ds = linear_dataset(42, 100);
  for (const std::uint64_t seed : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{12345}}) {
    const CvScore score = kfold_cv(ds, {"x0", "x1"}, 10, seed);
    CHECK(score.mean_r2 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(score.degenerate_folds == 0);
  }
}

TEST_CASE("kfold_cv is deterministic") {
  const AlignedDataset ds = linear_dataset(43, 60);
  const CvScore a = kfold_cv(ds, {"x0", "x1"}, 10, 777);
  const CvScore b = kfold_cv(ds, {"x0", "x1"}, 10, 777);
  CHECK(a.fold_r2 == b.fold_r2);
  CHECK(a.mean_r2 == b.mean_r2);
  CHECK(a.std_r2 == b.std_r2);
  CHECK(a.seed == 777);
}

TEST_CASE("kfold_cv aggregates fold scores") {
  SplitMix64 rng(55);
  const auto x0 = testutil::gaussian_vector(rng, 90);
  auto y = testutil::gaussian_vector(rng, 90, 0.0, 0.3);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x0[i];
  const AlignedDataset ds = make_dataset({"x0"}, {x0}, y, "x0");
  const CvScore score = kfold_cv(ds, {"x0"}, 10, 5);
  REQUIRE(score.fold_r2.size() == 10);
  double total = 0.0;
  for (const double r : score.fold_r2) {
    CHECK(!std::isnan(r));
    CHECK(r <= 1.0);
    total += r;
  }
  CHECK(std::abs(score.mean_r2 - total / 10.0) <= 1e-12);
  CHECK(score.std_r2 == doctest::Approx(sample_std(score.fold_r2)).epsilon(1e-12));
}

TEST_CASE("kfold_cv flags degenerate folds") {
  SplitMix64 rng(66);
  const auto x0 = testutil::gaussian_vector(rng, 40);
  const std::vector<double> y(40, 3.25);  // zero variance everywhere
  const AlignedDataset ds = make_dataset({"x0"}, {x0}, y, "x0");
  const CvScore score = kfold_cv(ds, {"x0"}, 10, 1);
  CHECK(score.degenerate_folds == 10);
  CHECK(std::isnan(score.mean_r2));
}

TEST_CASE("kfold_cv mean is invariant to subset column order") {
  SplitMix64 rng(77);
  const auto x0 = testutil::gaussian_vector(rng, 80);
  const auto x1 = testutil::gaussian_vector(rng, 80);
  const auto x2 = testutil::gaussian_vector(rng, 80);
  auto y = testutil::gaussian_vector(rng, 80, 0.0, 0.5);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += x0[i] - 0.5 * x1[i];
  const AlignedDataset ds = make_dataset({"x0", "x1", "x2"}, {x0, x1, x2}, y, "x0");
  const CvScore a = kfold_cv(ds, {"x0", "x1", "x2"}, 10, 3);
  const CvScore b = kfold_cv(ds, {"x2", "x0", "x1"}, 10, 3);
  CHECK(std::abs(a.mean_r2 - b.mean_r2) < 1e-9);
}

TEST_CASE("training R2 is non-decreasing over nested subsets") {
  SplitMix64 rng(88);
  const std::size_t n = 60;
  Columns x;
  for (int j = 0; j < 5; ++j) x.push_back(testutil::gaussian_vector(rng, n));
  auto y = testutil::gaussian_vector(rng, n, 0.0, 0.8);
  for (std::size_t i = 0; i < n; ++i) y[i] += 0.7 * x[0][i] - 0.2 * x[3][i];

  double prev = -1e9;
  Columns nested;
  for (std::size_t j = 0; j < x.size(); ++j) {
    nested.push_back(x[j]);
    const OlsModel m = fit_ols(nested, y, 0.0);
    const double r2 = r_squared(y, predict(m, nested));
    CHECK(r2 >= prev - 1e-10);
    prev = r2;
  }
}

TEST_CASE("kfold_cv input validation") {
  const AlignedDataset ds = linear_dataset(1, 30);
  CHECK_THROWS_AS(kfold_cv(ds, {}, 10, 0), ValidationError);
  CHECK_THROWS_AS(kfold_cv(ds, {"nope"}, 10, 0), ValidationError);
  CHECK_THROWS_AS(kfold_cv(ds, {"x0"}, 1, 0), ValidationError);
  CHECK_THROWS_AS(kfold_cv(ds, {"x0"}, 31, 0), ValidationError);
}

}  // TEST_SUITE
