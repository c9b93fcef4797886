#include "shrinkbench/selectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "shrinkbench/errors.hpp"
#include "shrinkbench/regression.hpp"
#include "shrinkbench/rng.hpp"
#include "shrinkbench/stats.hpp"

namespace shrinkbench {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kRankTol = 1e-10;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Column indices ordered by (score desc, id lex asc); the single ranking rule
// behind every SelectionResult.
std::vector<std::size_t> rank_columns(const FeatureMatrix& m, const std::vector<double>& scores) {
  std::vector<std::size_t> order(m.n_cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return m.column_ids()[a] < m.column_ids()[b];
  });
  return order;
}

SelectionResult finalize(const AlignedDataset& ds, MethodId id, std::vector<double> scores, int k,
                         std::map<std::string, std::string> diagnostics) {
  const FeatureMatrix& m = ds.features();
  const std::vector<std::size_t> order = rank_columns(m, scores);
  SelectionResult result;
  result.method_id = id;
  result.scores = std::move(scores);
  result.diagnostics = std::move(diagnostics);
  result.selected.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    result.selected.push_back(m.column_ids()[order[static_cast<std::size_t>(i)]]);
  }
  return result;
}

// Integer rank scores for search methods: the i-th entry of `ranked` (a total
// order over some candidate columns, best first) gets n - i; everything else
// keeps `rest`. Guarantees top-k(scores) == first k of `ranked`.
std::vector<double> rank_scores(std::size_t n_cols, const std::vector<std::size_t>& ranked,
                                double rest = -1.0) {
  std::vector<double> scores(n_cols, rest);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    scores[ranked[i]] = static_cast<double>(ranked.size() - i);
  }
  return scores;
}

std::vector<double> abs_correlations(const AlignedDataset& ds) {
  const FeatureMatrix& m = ds.features();
  std::vector<double> cor(m.n_cols());
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    cor[j] = std::abs(pearson(m.column(j), ds.y()));
  }
  return cor;
}

// Column indices in lexicographic id order. Iteration inside lasso and the
// forest follows this, so results do not depend on how the caller ordered the
// matrix columns.
std::vector<std::size_t> canonical_columns(const FeatureMatrix& m) {
  std::vector<std::size_t> order(m.n_cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return m.column_ids()[a] < m.column_ids()[b];
  });
  return order;
}

// Deterministic argmax over candidate evaluations; ties resolved by the
// caller via lexicographic ids.
struct BestPick {
  std::size_t index = 0;
  double value = -std::numeric_limits<double>::infinity();
  bool any = false;
};

}  // namespace

// ---------------------------------------------------------------------------
// Method ids

std::string to_string(MethodId id) {
  switch (id) {
    case MethodId::Var: return "var";
    case MethodId::Cor: return "cor";
    case MethodId::MutualInformation: return "mutual_information";
    case MethodId::Forward: return "forward";
    case MethodId::Backward: return "backward";
    case MethodId::Stepwise: return "stepwise";
    case MethodId::Rfe: return "rfe";
    case MethodId::Simulated: return "simulated";
    case MethodId::Lasso: return "lasso";
    case MethodId::TreeBase: return "tree_base";
    case MethodId::Eu: return "eu";
    case MethodId::Dtw: return "dtw";
    case MethodId::Hausdorff: return "hausdorff";
    case MethodId::Frechet: return "frechet";
    case MethodId::EditDistance: return "edit_distance";
    case MethodId::Lcss: return "lcss";
    case MethodId::Erp: return "erp";
    case MethodId::Sspd: return "sspd";
  }
  return "unknown";
}

MethodId method_from_string(std::string_view s) {
  static const std::map<std::string, MethodId, std::less<>> kIds = {
      {"var", MethodId::Var},
      {"cor", MethodId::Cor},
      {"mutual_information", MethodId::MutualInformation},
      {"forward", MethodId::Forward},
      {"backward", MethodId::Backward},
      {"stepwise", MethodId::Stepwise},
      {"rfe", MethodId::Rfe},
      {"simulated", MethodId::Simulated},
      {"lasso", MethodId::Lasso},
      {"tree_base", MethodId::TreeBase},
      {"eu", MethodId::Eu},
      {"dtw", MethodId::Dtw},
      {"hausdorff", MethodId::Hausdorff},
      {"frechet", MethodId::Frechet},
      {"edit_distance", MethodId::EditDistance},
      {"lcss", MethodId::Lcss},
      {"erp", MethodId::Erp},
      {"sspd", MethodId::Sspd},
  };
  const auto it = kIds.find(s);
  if (it == kIds.end()) {
    throw ValidationError("unknown selector method: '" + std::string(s) + "'");
  }
  return it->second;
}

std::vector<MethodId> default_methods() {
  return {MethodId::Var,      MethodId::Cor,      MethodId::MutualInformation,
          MethodId::Forward,  MethodId::Backward, MethodId::Stepwise,
          MethodId::Rfe,      MethodId::Simulated, MethodId::Lasso,
          MethodId::TreeBase, MethodId::Eu,       MethodId::Dtw,
          MethodId::Hausdorff, MethodId::Frechet, MethodId::EditDistance};
}

MethodFamily method_family(MethodId id) {
  switch (id) {
    case MethodId::Var:
    case MethodId::Cor:
    case MethodId::MutualInformation:
      return MethodFamily::Filter;
    case MethodId::Forward:
    case MethodId::Backward:
    case MethodId::Stepwise:
    case MethodId::Rfe:
    case MethodId::Simulated:
      return MethodFamily::Wrapper;
    case MethodId::Lasso:
    case MethodId::TreeBase:
      return MethodFamily::Embedded;
    default:
      return MethodFamily::Similarity;
  }
}

std::string to_string(MethodFamily family) {
  switch (family) {
    case MethodFamily::Filter: return "filters";
    case MethodFamily::Wrapper: return "wrappers";
    case MethodFamily::Embedded: return "embedded";
    case MethodFamily::Similarity: return "similarity";
  }
  return "unknown";
}

void SelectorSpec::validate(std::size_t n_features) const {
  if (k < 1) throw ValidationError("selector: k must be >= 1");
  if (static_cast<std::size_t>(k) > n_features) {
    throw ValidationError("selector: k = " + std::to_string(k) + " exceeds feature count " +
                          std::to_string(n_features));
  }
  if (wrapper_prescreen < k) {
    throw ValidationError("selector: wrapper_prescreen must be >= k");
  }
  metric_params.validate();
  if (sa_params.iters < 0 || !(sa_params.alpha > 0.0) || !(sa_params.t0 > 0.0)) {
    throw ValidationError("selector: invalid simulated-annealing parameters");
  }
  if (lasso_params.path_len < 1 || !(lasso_params.tol > 0.0) || lasso_params.max_sweeps < 1) {
    throw ValidationError("selector: invalid lasso parameters");
  }
  if (forest_params.trees < 1 || forest_params.max_depth < 1 || forest_params.min_leaf < 1) {
    throw ValidationError("selector: invalid forest parameters");
  }
}

// ---------------------------------------------------------------------------
// Filters

SelectionResult filter_variance(const AlignedDataset& ds, int k) {
  const FeatureMatrix& m = ds.features();
  std::vector<double> scores(m.n_cols());
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    scores[j] = sample_variance(m.column(j));
  }
  return finalize(ds, MethodId::Var, std::move(scores), k, {});
}

SelectionResult filter_correlation(const AlignedDataset& ds, int k) {
  return finalize(ds, MethodId::Cor, abs_correlations(ds), k, {});
}

double histogram_mutual_information(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) {
    throw ValidationError("mutual information: length mismatch or too few rows");
  }
  const std::size_t bins =
      static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));

  // Equal-frequency bin edges taken from the sorted values; assignment by
  // counting edges <= v keeps ties in one bin and is row-order invariant.
  const auto bin_of = [&](std::span<const double> v) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> edges;
    edges.reserve(bins - 1);
    for (std::size_t b = 1; b < bins; ++b) {
      edges.push_back(sorted[b * n / bins]);
    }
    std::vector<std::size_t> assigned(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t idx = 0;
      for (const double e : edges) {
        if (e <= v[i]) ++idx;
      }
      assigned[i] = idx;
    }
    return assigned;
  };

  const std::vector<std::size_t> bx = bin_of(x);
  const std::vector<std::size_t> by = bin_of(y);
  std::vector<std::size_t> joint(bins * bins, 0);
  std::vector<std::size_t> mx(bins, 0), my(bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[bx[i] * bins + by[i]];
    ++mx[bx[i]];
    ++my[by[i]];
  }
  const double dn = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t a = 0; a < bins; ++a) {
    for (std::size_t b = 0; b < bins; ++b) {
      const std::size_t c = joint[a * bins + b];
      if (c == 0) continue;
      const double pxy = static_cast<double>(c) / dn;
      mi += pxy * std::log(pxy * dn * dn /
                           (static_cast<double>(mx[a]) * static_cast<double>(my[b])));
    }
  }
  return std::max(mi, 0.0);
}

SelectionResult filter_mutual_information(const AlignedDataset& ds, int k) {
  const FeatureMatrix& m = ds.features();
  std::vector<double> scores(m.n_cols());
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    scores[j] = histogram_mutual_information(m.column(j), ds.y());
  }
  return finalize(ds, MethodId::MutualInformation, std::move(scores), k, {});
}

// ---------------------------------------------------------------------------
// Wrapper support

std::vector<std::size_t> prescreen_pool(const AlignedDataset& ds, int p) {
  if (p < 1) throw ValidationError("prescreen: pool size must be >= 1");
  const std::vector<double> cor = abs_correlations(ds);
  std::vector<std::size_t> order = rank_columns(ds.features(), cor);
  order.resize(std::min(order.size(), static_cast<std::size_t>(p)));
  return order;
}

struct PooledCvObjective::Impl {
  struct Fold {
    Eigen::MatrixXd gram;   // sum x_p x_q over training rows
    Eigen::VectorXd xy;     // sum x_p y
    Eigen::VectorXd xsum;   // sum x_p
    double ysum = 0.0;
    std::size_t n_train = 0;
    std::vector<std::size_t> test_rows;
    double test_mean = 0.0;
    double test_sstot = 0.0;
    bool degenerate = false;
  };

  Eigen::MatrixXd data;  // n x p pool matrix
  std::vector<double> y;
  std::vector<std::size_t> pool;
  std::vector<Fold> folds;
};

PooledCvObjective::PooledCvObjective(const AlignedDataset& ds, std::vector<std::size_t> pool,
                                     int folds, std::uint64_t seed)
    : impl_(std::make_unique<Impl>()) {
  if (pool.empty()) throw ValidationError("cv objective: empty pool");
  const std::size_t n = ds.n_rows();
  const std::size_t p = pool.size();
  impl_->pool = std::move(pool);
  impl_->y = ds.y();
  impl_->data.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  for (std::size_t c = 0; c < p; ++c) {
    const std::vector<double>& col = ds.features().column(impl_->pool[c]);
    for (std::size_t i = 0; i < n; ++i) {
      impl_->data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = col[i];
    }
  }

  const std::vector<int> fold_of = fold_assignment(n, folds, seed);

  // Full-data moments once, then training moments per fold by subtracting the
  // held-out rows.
  const Eigen::MatrixXd full_gram = impl_->data.transpose() * impl_->data;
  Eigen::VectorXd full_xy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  Eigen::VectorXd full_xsum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  double full_ysum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    full_xy += impl_->data.row(static_cast<Eigen::Index>(i)).transpose() * impl_->y[i];
    full_xsum += impl_->data.row(static_cast<Eigen::Index>(i)).transpose();
    full_ysum += impl_->y[i];
  }

  impl_->folds.resize(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    auto& fold = impl_->folds[static_cast<std::size_t>(f)];
    Eigen::MatrixXd held_gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                      static_cast<Eigen::Index>(p));
    Eigen::VectorXd held_xy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::VectorXd held_xsum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    double held_ysum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (fold_of[i] != f) continue;
      const auto row = impl_->data.row(static_cast<Eigen::Index>(i));
      held_gram += row.transpose() * row;
      held_xy += row.transpose() * impl_->y[i];
      held_xsum += row.transpose();
      held_ysum += impl_->y[i];
      fold.test_rows.push_back(i);
    }
    fold.gram = full_gram - held_gram;
    fold.xy = full_xy - held_xy;
    fold.xsum = full_xsum - held_xsum;
    fold.ysum = full_ysum - held_ysum;
    fold.n_train = n - fold.test_rows.size();

    const std::size_t nt = fold.test_rows.size();
    fold.test_mean = nt > 0 ? held_ysum / static_cast<double>(nt) : 0.0;
    fold.test_sstot = 0.0;
    for (const std::size_t i : fold.test_rows) {
      const double d = impl_->y[i] - fold.test_mean;
      fold.test_sstot += d * d;
    }
    fold.degenerate = fold.test_sstot == 0.0 || fold.n_train < 2;
  }
}

PooledCvObjective::~PooledCvObjective() = default;
PooledCvObjective::PooledCvObjective(PooledCvObjective&&) noexcept = default;
PooledCvObjective& PooledCvObjective::operator=(PooledCvObjective&&) noexcept = default;

const std::vector<std::size_t>& PooledCvObjective::pool() const { return impl_->pool; }

double PooledCvObjective::mean_r2(std::span<const std::size_t> subset) const {
  if (subset.empty()) throw ValidationError("cv objective: empty subset");
  const auto k = static_cast<Eigen::Index>(subset.size());
  double total = 0.0;
  int valid = 0;

  for (const auto& fold : impl_->folds) {
    if (fold.degenerate) continue;
    const double nt = static_cast<double>(fold.n_train);
    const double y_mean = fold.ysum / nt;

    // Centered and standardized subset moments from the fold's raw sums.
    Eigen::VectorXd mu(k), sigma(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto sa = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]);
      mu(a) = fold.xsum(sa) / nt;
      const double centered = fold.gram(sa, sa) - fold.xsum(sa) * fold.xsum(sa) / nt;
      sigma(a) = centered > 0.0 ? std::sqrt(centered / (nt - 1.0)) : 0.0;
    }
    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      const auto sa = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b <= a; ++b) {
        const auto sb = static_cast<Eigen::Index>(subset[static_cast<std::size_t>(b)]);
        double v = fold.gram(sa, sb) - fold.xsum(sa) * fold.xsum(sb) / nt;
        v = (sigma(a) > 0.0 && sigma(b) > 0.0) ? v / (sigma(a) * sigma(b)) : 0.0;
        gram(a, b) = v;
        gram(b, a) = v;
      }
      double c = fold.xy(sa) - fold.xsum(sa) * fold.ysum / nt;
      rhs(a) = sigma(a) > 0.0 ? c / sigma(a) : 0.0;
    }

    // Same lambda policy as kfold_cv: 0 unless columns outnumber rows or the
    // solve is rank deficient, then 1e-8 per non-constant column.
    double lambda = 0.0;
    int nonconstant = 0;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (sigma(a) > 0.0) ++nonconstant;
    }
    const double fallback = 1e-8 * static_cast<double>(nonconstant);
    if (subset.size() >= fold.n_train) lambda = fallback;

    Eigen::VectorXd beta_std;
    for (int attempt = 0; attempt < 2; ++attempt) {
      Eigen::MatrixXd a = gram;
      a.diagonal().array() += lambda;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
      bool deficient = ldlt.info() != Eigen::Success;
      if (!deficient) {
        const Eigen::VectorXd d = ldlt.vectorD();
        const double dmax = d.cwiseAbs().maxCoeff();
        if (!(dmax > 0.0) || d.minCoeff() < kRankTol * dmax) deficient = true;
      }
      if (!deficient) {
        beta_std = ldlt.solve(rhs);
        break;
      }
      if (lambda > 0.0) {
        beta_std = a.completeOrthogonalDecomposition().solve(rhs);
        break;
      }
      lambda = fallback;
    }

    // Map back to the original scale and score the held-out rows.
    double intercept = y_mean;
    Eigen::VectorXd beta(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      beta(a) = sigma(a) > 0.0 ? beta_std(a) / sigma(a) : 0.0;
      intercept -= beta(a) * mu(a);
    }
    double ss_res = 0.0;
    for (const std::size_t i : fold.test_rows) {
      double pred = intercept;
      for (Eigen::Index a = 0; a < k; ++a) {
        pred += beta(a) * impl_->data(static_cast<Eigen::Index>(i),
                                      static_cast<Eigen::Index>(subset[static_cast<std::size_t>(a)]));
      }
      const double d = impl_->y[i] - pred;
      ss_res += d * d;
    }
    if (!std::isfinite(ss_res)) continue;
    total += 1.0 - ss_res / fold.test_sstot;
    ++valid;
  }
  return valid > 0 ? total / static_cast<double>(valid) : kNan;
}

// ---------------------------------------------------------------------------
// Wrappers

namespace {

// Greedy forward additions until `subset` has `target` members; appends the
// per-step CV mean R^2 to `trace`.
void forward_fill(const AlignedDataset& ds, const PooledCvObjective& obj,
                  std::vector<std::size_t>& subset, std::size_t target,
                  std::vector<double>& trace) {
  const std::vector<std::size_t>& pool = obj.pool();
  std::vector<bool> in_subset(pool.size(), false);
  for (const std::size_t s : subset) in_subset[s] = true;

  std::vector<std::size_t> candidate(subset.begin(), subset.end());
  candidate.push_back(0);
  while (subset.size() < target) {
    BestPick best;
    std::string best_id;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (in_subset[c]) continue;
      candidate.back() = c;
      const double r2 = obj.mean_r2(candidate);
      const std::string& id = ds.features().column_ids()[pool[c]];
      const double v = std::isnan(r2) ? -std::numeric_limits<double>::infinity() : r2;
      const bool take = !best.any || v > best.value || (v == best.value && id < best_id);
      if (take) {
        best.index = c;
        best.value = v;
        best.any = true;
        best_id = id;
      }
    }
    if (!best.any) break;
    subset.push_back(best.index);
    in_subset[best.index] = true;
    candidate[subset.size() - 1] = best.index;
    candidate.push_back(0);
    trace.push_back(best.value);
  }
}

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(12);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ',';
    os << v[i];
  }
  return os.str();
}

std::string join_ids(const AlignedDataset& ds, const std::vector<std::size_t>& cols) {
  std::ostringstream os;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) os << ',';
    os << ds.features().column_ids()[cols[i]];
  }
  return os.str();
}

}  // namespace

SelectionResult wrapper_forward(const AlignedDataset& ds, const SelectorSpec& spec) {
  const std::vector<std::size_t> pool = prescreen_pool(ds, spec.wrapper_prescreen);
  const PooledCvObjective obj(ds, pool, 10, derive_seed(spec.seed, "cv"));

  std::vector<std::size_t> subset;
  std::vector<double> trace;
  forward_fill(ds, obj, subset, static_cast<std::size_t>(spec.k), trace);

  std::vector<std::size_t> ranked;
  ranked.reserve(subset.size());
  for (const std::size_t s : subset) ranked.push_back(pool[s]);

  std::map<std::string, std::string> diag;
  diag["step_r2"] = join_doubles(trace);
  diag["pool_size"] = std::to_string(pool.size());
  return finalize(ds, MethodId::Forward, rank_scores(ds.features().n_cols(), ranked), spec.k,
                  std::move(diag));
}

SelectionResult wrapper_backward(const AlignedDataset& ds, const SelectorSpec& spec) {
  const std::vector<std::size_t> pool = prescreen_pool(ds, spec.wrapper_prescreen);
  const PooledCvObjective obj(ds, pool, 10, derive_seed(spec.seed, "cv"));
  const std::size_t p = pool.size();

  // Eliminate down to k for the selection, then keep eliminating to rank the
  // survivors; the full elimination order (last out = best) is the ranking.
  std::vector<std::size_t> current(p);
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::vector<std::size_t> elimination;  // local pool indices, first out first
  std::vector<double> trace;

  std::vector<std::size_t> scratch;
  while (current.size() > 1) {
    BestPick best;
    std::string best_id;
    for (std::size_t drop = 0; drop < current.size(); ++drop) {
      scratch.clear();
      for (std::size_t i = 0; i < current.size(); ++i) {
        if (i != drop) scratch.push_back(current[i]);
      }
      const double r2 = obj.mean_r2(scratch);
      const double v = std::isnan(r2) ? -std::numeric_limits<double>::infinity() : r2;
      const std::string& id = ds.features().column_ids()[pool[current[drop]]];
      const bool take = !best.any || v > best.value || (v == best.value && id < best_id);
      if (take) {
        best.index = drop;
        best.value = v;
        best.any = true;
        best_id = id;
      }
    }
    // Below k the loop only keeps running to rank the survivors.
    if (current.size() > static_cast<std::size_t>(spec.k)) trace.push_back(best.value);
    elimination.push_back(current[best.index]);
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(best.index));
  }
  elimination.push_back(current.front());

  // Ranking: reverse elimination order, mapped to dataset columns.
  std::vector<std::size_t> ranked;
  ranked.reserve(p);
  for (auto it = elimination.rbegin(); it != elimination.rend(); ++it) {
    ranked.push_back(pool[*it]);
  }

  std::map<std::string, std::string> diag;
  diag["step_r2"] = join_doubles(trace);
  diag["pool_size"] = std::to_string(p);
  return finalize(ds, MethodId::Backward, rank_scores(ds.features().n_cols(), ranked), spec.k,
                  std::move(diag));
}

SelectionResult wrapper_stepwise(const AlignedDataset& ds, const SelectorSpec& spec) {
  constexpr double kImprove = 1e-6;
  const std::vector<std::size_t> pool = prescreen_pool(ds, spec.wrapper_prescreen);
  const PooledCvObjective obj(ds, pool, 10, derive_seed(spec.seed, "cv"));

  std::vector<std::size_t> subset;  // local pool indices, in add order
  std::vector<double> trace;
  const int cap = 10 * spec.k;
  int iterations = 0;
  bool cap_hit = false;

  std::vector<std::size_t> scratch;
  while (true) {
    if (iterations >= cap) {
      cap_hit = true;
      break;
    }
    ++iterations;

    if (subset.size() < static_cast<std::size_t>(spec.k)) {
      std::vector<std::size_t> one_step = subset;
      forward_fill(ds, obj, one_step, subset.size() + 1, trace);
      subset = std::move(one_step);
    }

    // Backward sweep: drop the best-improving feature while any removal beats
    // the current score by more than the threshold.
    bool dropped = false;
    while (subset.size() > 1) {
      const double current = obj.mean_r2(subset);
      BestPick best;
      std::string best_id;
      for (std::size_t drop = 0; drop < subset.size(); ++drop) {
        scratch.clear();
        for (std::size_t i = 0; i < subset.size(); ++i) {
          if (i != drop) scratch.push_back(subset[i]);
        }
        const double r2 = obj.mean_r2(scratch);
        const double v = std::isnan(r2) ? -std::numeric_limits<double>::infinity() : r2;
        const std::string& id = ds.features().column_ids()[pool[subset[drop]]];
        const bool take = !best.any || v > best.value || (v == best.value && id < best_id);
        if (take) {
          best.index = drop;
          best.value = v;
          best.any = true;
          best_id = id;
        }
      }
      if (!best.any || std::isnan(current) || best.value <= current + kImprove) break;
      subset.erase(subset.begin() + static_cast<std::ptrdiff_t>(best.index));
      dropped = true;
    }

    if (subset.size() == static_cast<std::size_t>(spec.k) && !dropped) break;
  }
  if (subset.size() < static_cast<std::size_t>(spec.k)) {
    forward_fill(ds, obj, subset, static_cast<std::size_t>(spec.k), trace);
  }

  std::vector<std::size_t> ranked;
  ranked.reserve(subset.size());
  for (const std::size_t s : subset) ranked.push_back(pool[s]);

  std::map<std::string, std::string> diag;
  diag["step_r2"] = join_doubles(trace);
  diag["iterations"] = std::to_string(iterations);
  diag["cap_hit"] = cap_hit ? "true" : "false";
  return finalize(ds, MethodId::Stepwise, rank_scores(ds.features().n_cols(), ranked), spec.k,
                  std::move(diag));
}

SelectionResult wrapper_rfe(const AlignedDataset& ds, const SelectorSpec& spec) {
  const std::vector<std::size_t> pool = prescreen_pool(ds, spec.wrapper_prescreen);

  // Standardized pool columns so coefficient magnitudes are comparable.
  Columns cols;
  cols.reserve(pool.size());
  for (const std::size_t j : pool) {
    cols.push_back(normalize(ds.features().column(j), NormalizationMode::Zscore));
  }

  std::vector<std::size_t> current(pool.size());  // local indices
  std::iota(current.begin(), current.end(), std::size_t{0});
  std::vector<std::size_t> elimination;

  Columns design;
  while (current.size() > static_cast<std::size_t>(spec.k)) {
    design.clear();
    for (const std::size_t c : current) design.push_back(cols[c]);
    const OlsModel model = fit_ols(design, ds.y(), default_ridge_lambda(design));

    std::size_t worst = 0;
    for (std::size_t i = 1; i < current.size(); ++i) {
      const double a = std::abs(model.coefficients[i]);
      const double w = std::abs(model.coefficients[worst]);
      const std::string& id = ds.features().column_ids()[pool[current[i]]];
      const std::string& wid = ds.features().column_ids()[pool[current[worst]]];
      if (a < w || (a == w && id < wid)) worst = i;
    }
    elimination.push_back(current[worst]);
    current.erase(current.begin() + static_cast<std::ptrdiff_t>(worst));
  }

  // Final fit orders the survivors by |coefficient|.
  design.clear();
  for (const std::size_t c : current) design.push_back(cols[c]);
  const OlsModel final_model = fit_ols(design, ds.y(), default_ridge_lambda(design));
  std::vector<std::size_t> surv_order(current.size());
  std::iota(surv_order.begin(), surv_order.end(), std::size_t{0});
  std::sort(surv_order.begin(), surv_order.end(), [&](std::size_t a, std::size_t b) {
    const double ca = std::abs(final_model.coefficients[a]);
    const double cb = std::abs(final_model.coefficients[b]);
    if (ca != cb) return ca > cb;
    return ds.features().column_ids()[pool[current[a]]] <
           ds.features().column_ids()[pool[current[b]]];
  });

  std::vector<std::size_t> ranked;
  ranked.reserve(pool.size());
  for (const std::size_t s : surv_order) ranked.push_back(pool[current[s]]);
  for (auto it = elimination.rbegin(); it != elimination.rend(); ++it) {
    ranked.push_back(pool[*it]);
  }

  std::map<std::string, std::string> diag;
  std::vector<std::size_t> elim_cols;
  elim_cols.reserve(elimination.size());
  for (const std::size_t e : elimination) elim_cols.push_back(pool[e]);
  diag["elimination_order"] = join_ids(ds, elim_cols);
  diag["pool_size"] = std::to_string(pool.size());
  return finalize(ds, MethodId::Rfe, rank_scores(ds.features().n_cols(), ranked), spec.k,
                  std::move(diag));
}

SelectionResult wrapper_simulated_annealing(const AlignedDataset& ds, const SelectorSpec& spec) {
  const std::vector<std::size_t> pool = prescreen_pool(ds, spec.wrapper_prescreen);
  const PooledCvObjective obj(ds, pool, 10, derive_seed(spec.seed, "cv"));
  const std::size_t p = pool.size();
  const std::size_t k = static_cast<std::size_t>(spec.k);

  // PRNG stream (replayable): partial Fisher-Yates for the initial subset,
  // then per iteration exactly three draws: selected slot, unselected slot,
  // acceptance uniform (consumed even when the move is an improvement).
  SplitMix64 rng(derive_seed(spec.seed, "sa"));
  std::vector<std::size_t> arrangement(p);
  std::iota(arrangement.begin(), arrangement.end(), std::size_t{0});
  for (std::size_t i = 0; i < k && i + 1 < p; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(p - i));
    std::swap(arrangement[i], arrangement[j]);
  }
  std::vector<std::size_t> selected(arrangement.begin(),
                                    arrangement.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<std::size_t> unselected(arrangement.begin() + static_cast<std::ptrdiff_t>(k),
                                      arrangement.end());

  double current = obj.mean_r2(selected);
  std::vector<std::size_t> best_subset = selected;
  double best = current;
  std::string decisions;
  decisions.reserve(static_cast<std::size_t>(spec.sa_params.iters));
  int accepts = 0;

  if (!unselected.empty()) {
    double temp = spec.sa_params.t0;
    for (int it = 0; it < spec.sa_params.iters; ++it) {
      const std::size_t si = static_cast<std::size_t>(rng.next_below(k));
      const std::size_t ui = static_cast<std::size_t>(rng.next_below(unselected.size()));
      const double u = rng.next_double();

      std::swap(selected[si], unselected[ui]);
      const double proposed = obj.mean_r2(selected);
      const double delta = proposed - current;
      const bool accept =
          std::isnan(current) ? !std::isnan(proposed)
                              : (delta > 0.0 || u < std::exp(delta / temp));
      if (accept) {
        current = proposed;
        ++accepts;
        if (std::isnan(best) || (!std::isnan(current) && current > best)) {
          best = current;
          best_subset = selected;
        }
      } else {
        std::swap(selected[si], unselected[ui]);  // undo
      }
      decisions.push_back(accept ? 'A' : 'R');
      temp *= spec.sa_params.alpha;
    }
  }

  // Rank the chosen subset by |correlation| (descending) for a stable order.
  const std::vector<double> cor = abs_correlations(ds);
  std::sort(best_subset.begin(), best_subset.end(), [&](std::size_t a, std::size_t b) {
    if (cor[pool[a]] != cor[pool[b]]) return cor[pool[a]] > cor[pool[b]];
    return ds.features().column_ids()[pool[a]] < ds.features().column_ids()[pool[b]];
  });
  std::vector<std::size_t> ranked;
  ranked.reserve(best_subset.size());
  for (const std::size_t s : best_subset) ranked.push_back(pool[s]);

  std::map<std::string, std::string> diag;
  diag["sa_decisions"] = decisions;
  diag["sa_trace_len"] = std::to_string(decisions.size());
  diag["sa_accepts"] = std::to_string(accepts);
  diag["sa_best_r2"] = format_double(best);
  diag["pool_size"] = std::to_string(p);
  return finalize(ds, MethodId::Simulated, rank_scores(ds.features().n_cols(), ranked), spec.k,
                  std::move(diag));
}

// ---------------------------------------------------------------------------
// Embedded: lasso

LassoFitInfo lasso_coordinate_descent(const std::vector<std::vector<double>>& x_std,
                                      const std::vector<double>& y_centered, double lambda,
                                      double tol, int max_sweeps, std::vector<double>& beta) {
  const std::size_t m = x_std.size();
  const std::size_t n = y_centered.size();
  const double dn = static_cast<double>(n);

  std::vector<double> col_scale(m);  // (1/N) x_j . x_j
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (const double v : x_std[j]) s += v * v;
    col_scale[j] = s / dn;
  }

  std::vector<double> residual = y_centered;
  for (std::size_t j = 0; j < m; ++j) {
    if (beta[j] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) residual[i] -= x_std[j][i] * beta[j];
  }

  LassoFitInfo info;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    ++info.sweeps;
    double max_delta = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (col_scale[j] <= 0.0) continue;  // constant column never activates
      double rho = beta[j] * col_scale[j];
      for (std::size_t i = 0; i < n; ++i) rho += x_std[j][i] * residual[i] / dn;
      const double mag = std::abs(rho) - lambda;
      const double updated = mag > 0.0 ? std::copysign(mag, rho) / col_scale[j] : 0.0;
      const double delta = beta[j] - updated;
      if (delta != 0.0) {
        for (std::size_t i = 0; i < n; ++i) residual[i] += x_std[j][i] * delta;
        beta[j] = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (max_delta < tol) {
      info.converged = true;
      break;
    }
  }
  return info;
}

SelectionResult embedded_lasso(const AlignedDataset& ds, const SelectorSpec& spec) {
  const FeatureMatrix& m = ds.features();
  const std::size_t n_cols = m.n_cols();
  const std::size_t n = ds.n_rows();
  const double dn = static_cast<double>(n);

  // Coordinate order = lexicographic id order.
  const std::vector<std::size_t> canon = canonical_columns(m);
  Columns x_std;
  x_std.reserve(n_cols);
  for (std::size_t j = 0; j < n_cols; ++j) {
    x_std.push_back(normalize(m.column(canon[j]), NormalizationMode::Zscore));
  }
  const double y_mean = mean(ds.y());
  std::vector<double> yc(n);
  for (std::size_t i = 0; i < n; ++i) yc[i] = ds.y()[i] - y_mean;

  double lambda_max = 0.0;
  for (std::size_t j = 0; j < n_cols; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += x_std[j][i] * yc[i];
    lambda_max = std::max(lambda_max, std::abs(dot) / dn);
  }

  const int path_len = spec.lasso_params.path_len;
  std::vector<double> path;
  path.reserve(static_cast<std::size_t>(path_len));
  for (int i = 0; i < path_len; ++i) {
    const double t = path_len > 1 ? static_cast<double>(i) / static_cast<double>(path_len - 1)
                                  : 0.0;
    path.push_back(lambda_max * std::pow(1e-3, t));
  }

  std::vector<std::vector<double>> betas;
  betas.reserve(path.size());
  std::vector<double> beta(n_cols, 0.0);
  int total_sweeps = 0;
  bool all_converged = true;
  for (const double lambda : path) {
    const LassoFitInfo info =
        lasso_coordinate_descent(x_std, yc, lambda, spec.lasso_params.tol,
                                 spec.lasso_params.max_sweeps, beta);
    total_sweeps += info.sweeps;
    all_converged = all_converged && info.converged;
    betas.push_back(beta);
  }

  // Chosen lambda: smallest path value with at most k nonzero coefficients.
  const auto nnz = [](const std::vector<double>& b) {
    std::size_t c = 0;
    for (const double v : b) {
      if (v != 0.0) ++c;
    }
    return c;
  };
  std::size_t chosen = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (nnz(betas[i]) <= static_cast<std::size_t>(spec.k)) chosen = i;
  }
  const std::size_t next = std::min(chosen + 1, path.size() - 1);

  // Ranking: nonzero coefficients at the chosen lambda by |coefficient|, then
  // the rest by |coefficient| at the next-smaller lambda (zeros tie, broken
  // lexicographically). Indices below are canonical positions.
  std::vector<std::size_t> order(n_cols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::vector<double>& b_chosen = betas[chosen];
  const std::vector<double>& b_next = betas[next];
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const bool nza = b_chosen[a] != 0.0;
    const bool nzb = b_chosen[b] != 0.0;
    if (nza != nzb) return nza;
    const double va = nza ? std::abs(b_chosen[a]) : std::abs(b_next[a]);
    const double vb = nzb ? std::abs(b_chosen[b]) : std::abs(b_next[b]);
    if (va != vb) return va > vb;
    return m.column_ids()[canon[a]] < m.column_ids()[canon[b]];
  });
  std::vector<std::size_t> ranked;
  ranked.reserve(n_cols);
  for (const std::size_t pos : order) ranked.push_back(canon[pos]);

  std::map<std::string, std::string> diag;
  diag["lambda_chosen"] = format_double(path[chosen]);
  diag["lambda_max"] = format_double(lambda_max);
  diag["nonzero_at_chosen"] = std::to_string(nnz(b_chosen));
  diag["sweeps"] = std::to_string(total_sweeps);
  diag["converged"] = all_converged ? "true" : "false";
  return finalize(ds, MethodId::Lasso, rank_scores(n_cols, ranked), spec.k, std::move(diag));
}

// ---------------------------------------------------------------------------
// Embedded: regression forest importance

namespace {

struct SplitScan {
  double gain = 0.0;
  double threshold = 0.0;
  std::size_t feature = 0;
  bool found = false;
};

struct TreeBuilder {
  const FeatureMatrix& m;
  const std::vector<double>& y;
  const ForestParams& params;
  std::size_t mtry;
  SplitMix64& rng;
  std::vector<double>& importance;
  std::vector<std::size_t> feature_slots;
  std::vector<std::pair<double, double>> scratch;  // (x, y) pairs for one node

  void build(std::vector<std::size_t>& samples, int depth) {
    const std::size_t n = samples.size();
    if (depth >= params.max_depth || n < 2 * static_cast<std::size_t>(params.min_leaf)) return;

    double sum = 0.0, sum2 = 0.0;
    for (const std::size_t i : samples) {
      sum += y[i];
      sum2 += y[i] * y[i];
    }
    const double node_sse = sum2 - sum * sum / static_cast<double>(n);

    // mtry candidate features via partial Fisher-Yates, considered in draw
    // order; the first strictly-best split wins.
    for (std::size_t i = 0; i < mtry; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(rng.next_below(feature_slots.size() - i));
      std::swap(feature_slots[i], feature_slots[j]);
    }

    SplitScan best;
    for (std::size_t c = 0; c < mtry; ++c) {
      const std::size_t f = feature_slots[c];
      const std::vector<double>& col = m.column(f);
      scratch.clear();
      for (const std::size_t i : samples) scratch.emplace_back(col[i], y[i]);
      std::sort(scratch.begin(), scratch.end());

      double left_sum = 0.0, left_sum2 = 0.0;
      for (std::size_t pos = 1; pos < n; ++pos) {
        const auto& [xv, yv] = scratch[pos - 1];
        left_sum += yv;
        left_sum2 += yv * yv;
        if (xv >= scratch[pos].first) continue;  // no boundary between ties
        if (pos < static_cast<std::size_t>(params.min_leaf) ||
            n - pos < static_cast<std::size_t>(params.min_leaf)) {
          continue;
        }
        const double right_sum = sum - left_sum;
        const double right_sum2 = sum2 - left_sum2;
        const double sse_left = left_sum2 - left_sum * left_sum / static_cast<double>(pos);
        const double sse_right =
            right_sum2 - right_sum * right_sum / static_cast<double>(n - pos);
        const double gain = node_sse - sse_left - sse_right;
        if (gain > best.gain) {
          best.gain = gain;
          best.threshold = xv + (scratch[pos].first - xv) / 2.0;
          best.feature = f;
          best.found = true;
        }
      }
    }
    if (!best.found || !(best.gain > 0.0)) return;

    importance[best.feature] += best.gain;
    std::vector<std::size_t> left, right;
    left.reserve(n);
    right.reserve(n);
    const std::vector<double>& col = m.column(best.feature);
    for (const std::size_t i : samples) {
      (col[i] <= best.threshold ? left : right).push_back(i);
    }
    build(left, depth + 1);
    build(right, depth + 1);
  }
};

}  // namespace

SelectionResult embedded_tree_importance(const AlignedDataset& ds, const SelectorSpec& spec) {
  const FeatureMatrix& m = ds.features();
  const std::size_t n = ds.n_rows();
  const std::size_t n_cols = m.n_cols();
  const std::size_t mtry = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(n_cols))));

  std::vector<double> importance(n_cols, 0.0);
  for (int t = 0; t < spec.forest_params.trees; ++t) {
    SplitMix64 rng(derive_seed(spec.seed, fnv1a64("tree"), static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> samples(n);
    for (std::size_t i = 0; i < n; ++i) {
      samples[i] = static_cast<std::size_t>(rng.next_below(n));
    }
    TreeBuilder builder{m, ds.y(), spec.forest_params, mtry, rng, importance, {}, {}};
    builder.feature_slots = canonical_columns(m);
    builder.build(samples, 0);
  }

  double total = 0.0;
  for (const double v : importance) total += v;
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }

  std::map<std::string, std::string> diag;
  diag["trees"] = std::to_string(spec.forest_params.trees);
  diag["mtry"] = std::to_string(mtry);
  return finalize(ds, MethodId::TreeBase, std::move(importance), spec.k, std::move(diag));
}

// ---------------------------------------------------------------------------
// Similarity selectors

namespace {

MetricKind metric_for(MethodId id) {
  switch (id) {
    case MethodId::Eu: return MetricKind::Euclidean;
    case MethodId::Dtw: return MetricKind::Dtw;
    case MethodId::Hausdorff: return MetricKind::Hausdorff;
    case MethodId::Frechet: return MetricKind::Frechet;
    case MethodId::EditDistance: return MetricKind::Edr;
    case MethodId::Lcss: return MetricKind::Lcss;
    case MethodId::Erp: return MetricKind::Erp;
    case MethodId::Sspd: return MetricKind::Sspd;
    default:
      throw ValidationError("method '" + to_string(id) + "' is not a similarity selector");
  }
}

}  // namespace

SelectionResult similarity_select(const AlignedDataset& ds, const SelectorSpec& spec) {
  const FeatureMatrix& m = ds.features();
  const MetricKind kind = metric_for(spec.method_id);

  // Reference: the contemporaneous target series over the current rows (not
  // the horizon-shifted y), normalized like every candidate.
  const std::vector<double> reference =
      normalize(m.column(ds.target_column()), spec.metric_params.normalization);

  std::vector<double> scores(m.n_cols());
  for (std::size_t j = 0; j < m.n_cols(); ++j) {
    const std::vector<double> candidate = normalize(m.column(j), spec.metric_params.normalization);
    const double d = metric_distance(kind, candidate, reference, spec.metric_params);
    scores[j] = d == 0.0 ? 0.0 : -d;  // avoid -0
  }

  std::map<std::string, std::string> diag;
  diag["metric"] = to_string(kind);
  return finalize(ds, spec.method_id, std::move(scores), spec.k, std::move(diag));
}

// ---------------------------------------------------------------------------
// Dispatch

SelectionResult select(const AlignedDataset& ds, const SelectorSpec& spec) {
  spec.validate(ds.features().n_cols());
  switch (spec.method_id) {
    case MethodId::Var: return filter_variance(ds, spec.k);
    case MethodId::Cor: return filter_correlation(ds, spec.k);
    case MethodId::MutualInformation: return filter_mutual_information(ds, spec.k);
    case MethodId::Forward: return wrapper_forward(ds, spec);
    case MethodId::Backward: return wrapper_backward(ds, spec);
    case MethodId::Stepwise: return wrapper_stepwise(ds, spec);
    case MethodId::Rfe: return wrapper_rfe(ds, spec);
    case MethodId::Simulated: return wrapper_simulated_annealing(ds, spec);
    case MethodId::Lasso: return embedded_lasso(ds, spec);
    case MethodId::TreeBase: return embedded_tree_importance(ds, spec);
    default: return similarity_select(ds, spec);
  }
}

}  // namespace shrinkbench
