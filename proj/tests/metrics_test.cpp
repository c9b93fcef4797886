#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "shrinkbench/errors.hpp"
#include "shrinkbench/metrics.hpp"
#include "testutil.hpp"

using namespace shrinkbench;
using testutil::short_series;

namespace {

const MetricParams kDefaults{};

std::vector<std::pair<std::vector<double>, std::vector<double>>> seeded_pairs(
    std::uint64_t seed, std::size_t count, std::size_t min_len, std::size_t max_len) {
  SplitMix64 rng(seed);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs;
  pairs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pairs.emplace_back(short_series(rng, min_len, max_len), short_series(rng, min_len, max_len));
  }
  return pairs;
}

const std::vector<MetricKind> kAllKinds = {
    MetricKind::Euclidean, MetricKind::Dtw,       MetricKind::Lcss, MetricKind::Edr,
    MetricKind::Erp,       MetricKind::Hausdorff, MetricKind::Frechet, MetricKind::Sspd};

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("euclidean") {
  CHECK(euclidean(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(euclidean(std::vector<double>{0, 0}, std::vector<double>{3, 4}) == doctest::Approx(5.0));
  SplitMix64 rng(5);
  const auto a = testutil::gaussian_vector(rng, 20);
  const auto b = testutil::gaussian_vector(rng, 20);
  double ss = 0.0;
  for (std::size_t i = 0; i < 20; ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  CHECK(std::abs(euclidean(a, b) - std::sqrt(ss)) < 1e-12);
  CHECK_THROWS_AS(euclidean(std::vector<double>{1, 2}, std::vector<double>{1}), ValidationError);
  CHECK_THROWS_AS(euclidean(std::vector<double>{}, std::vector<double>{}), ValidationError);
}

TEST_CASE("dtw warps and handles unequal lengths") {
  CHECK(dtw(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, kDefaults) == 0.0);
  CHECK(dtw(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 2, 3}, kDefaults) == 0.0);
  CHECK(dtw(std::vector<double>{1, 3}, std::vector<double>{2}, kDefaults) == doctest::Approx(2.0));
  CHECK(oracles::dtw_enum(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 2, 3}) == 0.0);
  CHECK(oracles::dtw_enum(std::vector<double>{1, 3}, std::vector<double>{2}) == 2.0);
}

TEST_CASE("dtw band") {
  MetricParams p;
  p.dtw_band = 1;
  CHECK(dtw(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, p) == 0.0);
  // length difference beyond the band: no path exists
  p.dtw_band = 0;
  CHECK_THROWS_AS(dtw(std::vector<double>{1, 2, 3}, std::vector<double>{1}, p), ValidationError);
  // band 0 forces the diagonal
  const double diag = dtw(std::vector<double>{1, 2, 8}, std::vector<double>{2, 2, 3}, p);
  CHECK(diag == doctest::Approx(1.0 + 0.0 + 5.0));
}

TEST_CASE("lcss distance") {
  MetricParams p;
  p.epsilon_match = 0.5;
  CHECK(lcss_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, p) == 0.0);
  CHECK(lcss_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1.2, 2.1, 9}, p) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(lcss_distance(std::vector<double>{0, 0}, std::vector<double>{10, 10}, p) == 1.0);
  CHECK(oracles::lcss_dist_enum(std::vector<double>{1, 2, 3}, std::vector<double>{1.2, 2.1, 9},
                                0.5) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("edr") {
  MetricParams p;
  p.epsilon_match = 0.1;
  CHECK(edr(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}, p) == 0.0);
  CHECK(edr(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}, p) ==
        doctest::Approx(1.0 / 3.0));
  CHECK(edr(std::vector<double>{5}, std::vector<double>{1}, p) == 1.0);
}

TEST_CASE("erp") {
  MetricParams p;
  p.gap_ref = 0.0;
  CHECK(erp(std::vector<double>{1, 2}, std::vector<double>{1, 2}, p) == 0.0);
  CHECK(erp(std::vector<double>{1, 2}, std::vector<double>{0, 0}, p) == doctest::Approx(3.0));
  CHECK(oracles::erp_enum(std::vector<double>{1, 2}, std::vector<double>{0, 0}, 0.0) == 3.0);
}

TEST_CASE("hausdorff point embeddings") {
  CHECK(hausdorff(std::vector<double>{1, 2}, std::vector<double>{1, 2}, kDefaults) == 0.0);
  CHECK(hausdorff(std::vector<double>{0, 0}, std::vector<double>{0, 1}, kDefaults) ==
        doctest::Approx(1.0));
  CHECK(hausdorff(std::vector<double>{0}, std::vector<double>{3}, kDefaults) ==
        doctest::Approx(3.0));
}

TEST_CASE("discrete frechet") {
  CHECK(frechet_discrete(std::vector<double>{1, 2}, std::vector<double>{1, 2}, kDefaults) == 0.0);
  CHECK(frechet_discrete(std::vector<double>{0, 0}, std::vector<double>{0, 1}, kDefaults) ==
        doctest::Approx(1.0));
  CHECK(oracles::frechet_enum(std::vector<double>{0, 0}, std::vector<double>{0, 1}, 1.0) ==
        doctest::Approx(1.0));
}

TEST_CASE("sspd") {
  CHECK(sspd(std::vector<double>{1, 2}, std::vector<double>{1, 2}, kDefaults) == 0.0);
  // parallel horizontal segments offset by 1
  CHECK(sspd(std::vector<double>{0, 0}, std::vector<double>{1, 1}, kDefaults) ==
        doctest::Approx(1.0));
  CHECK(std::abs(sspd(std::vector<double>{0, 0}, std::vector<double>{1, 1}, kDefaults) -
                 oracles::sspd_dense(std::vector<double>{0, 0}, std::vector<double>{1, 1}, 1.0,
                                     10000)) < 1e-3);
  SUBCASE("dense-sampling oracle on irregular polylines") {
    SplitMix64 rng(9);
    for (int rep = 0; rep < 10; ++rep) {
      const auto a = short_series(rng, 2, 5);
      const auto b = short_series(rng, 2, 5);
      CHECK(std::abs(sspd(a, b, kDefaults) - oracles::sspd_dense(a, b, 1.0, 10000)) < 1e-3);
    }
  }
  SUBCASE("symmetric by construction") {
    SplitMix64 rng(10);
    for (int rep = 0; rep < 50; ++rep) {
      const auto a = short_series(rng, 1, 8);
      const auto b = short_series(rng, 1, 8);
      CHECK(sspd(a, b, kDefaults) == sspd(b, a, kDefaults));
    }
  }
}

TEST_CASE("DP measures equal exhaustive enumeration on 200 seeded short pairs") {
  const auto pairs = seeded_pairs(1234, 200, 1, 6);
  MetricParams p;
  p.epsilon_match = 0.5;
  p.gap_ref = 0.25;
  for (const auto& [a, b] : pairs) {
    CHECK(std::abs(dtw(a, b, p) - oracles::dtw_enum(a, b)) <= 1e-9);
    CHECK(std::abs(lcss_distance(a, b, p) - oracles::lcss_dist_enum(a, b, p.epsilon_match)) <=
          1e-9);
    CHECK(std::abs(edr(a, b, p) - oracles::edr_enum(a, b, p.epsilon_match)) <= 1e-9);
    CHECK(std::abs(erp(a, b, p) - oracles::erp_enum(a, b, p.gap_ref)) <= 1e-9);
    CHECK(std::abs(frechet_discrete(a, b, p) - oracles::frechet_enum(a, b, p.time_scale)) <=
          1e-9);
  }
}

TEST_CASE("identity and symmetry for all eight measures on 500 seeded pairs") {
  const auto pairs = seeded_pairs(777, 500, 1, 12);
  for (const MetricKind kind : kAllKinds) {
    for (const auto& [a, b] : pairs) {
      if (kind == MetricKind::Euclidean && a.size() != b.size()) continue;
      CHECK(metric_distance(kind, a, a, kDefaults) <= 1e-12);
      const double ab = metric_distance(kind, a, b, kDefaults);
      const double ba = metric_distance(kind, b, a, kDefaults);
      CHECK(std::abs(ab - ba) <= 1e-12);
      CHECK(ab >= 0.0);
      CHECK(std::isfinite(ab));
    }
  }
}

TEST_CASE("triangle inequality for erp, hausdorff and frechet on 1000 seeded triples") {
  SplitMix64 rng(4242);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto x = short_series(rng, 2, 10);
    const auto y = short_series(rng, 2, 10);
    const auto z = short_series(rng, 2, 10);
    for (const MetricKind kind : {MetricKind::Erp, MetricKind::Hausdorff, MetricKind::Frechet}) {
      const double xz = metric_distance(kind, x, z, kDefaults);
      const double xy = metric_distance(kind, x, y, kDefaults);
      const double yz = metric_distance(kind, y, z, kDefaults);
      CHECK(xz <= xy + yz + 1e-9);
    }
  }
}

TEST_CASE("stored counterexample: dtw violates the triangle inequality") {
  // Regression fixture. The middle series absorbs the repeated element of the
  // long one at no cost, so going through it is "shorter" than the direct
  // warp by a full unit.
  const std::vector<double> a = {0};
  const std::vector<double> b = {1, 0};
  const std::vector<double> c = {1, 1, 0};
  const double ac = dtw(a, c, kDefaults);
  const double ab = dtw(a, b, kDefaults);
  const double bc = dtw(b, c, kDefaults);
  CHECK(ac == doctest::Approx(2.0));
  CHECK(ab == doctest::Approx(1.0));
  CHECK(bc == doctest::Approx(0.0));
  CHECK(ac > ab + bc + 1e-9);
}

TEST_CASE("hausdorff is dominated by discrete frechet on 200 seeded pairs") {
  const auto pairs = seeded_pairs(31337, 200, 1, 12);
  for (const auto& [a, b] : pairs) {
    CHECK(hausdorff(a, b, kDefaults) <= frechet_discrete(a, b, kDefaults) + 1e-12);
  }
}

TEST_CASE("lcss and edr stay in [0,1] and are monotone in epsilon") {
  const auto pairs = seeded_pairs(999, 50, 1, 10);
  const std::vector<double> eps_grid = {0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0};
  for (const auto& [a, b] : pairs) {
    double prev_lcss = 2.0, prev_edr = 2.0;
    for (const double eps : eps_grid) {
      MetricParams p;
      p.epsilon_match = eps;
      const double l = lcss_distance(a, b, p);
      const double e = edr(a, b, p);
      CHECK(l >= 0.0);
      CHECK(l <= 1.0);
      CHECK(e >= 0.0);
      CHECK(e <= 1.0);
      CHECK(l <= prev_lcss + 1e-15);
      CHECK(e <= prev_edr + 1e-15);
      prev_lcss = l;
      prev_edr = e;
    }
  }
}

TEST_CASE("input validation") {
  const std::vector<double> empty;
  const std::vector<double> one = {1.0};
  for (const MetricKind kind : kAllKinds) {
    CHECK_THROWS_AS(metric_distance(kind, empty, one, kDefaults), ValidationError);
    CHECK_THROWS_AS(metric_distance(kind, one, empty, kDefaults), ValidationError);
  }
  MetricParams bad;
  bad.epsilon_match = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = MetricParams{};
  bad.time_scale = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = MetricParams{};
  bad.dtw_band = -2;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

}  // TEST_SUITE
