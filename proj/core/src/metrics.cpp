#include "deepclife/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <numeric>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

// Fenwick tree over risk ranks.
class RankCounter {
 public:
  explicit RankCounter(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t rank) {
    for (std::size_t i = rank + 1; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
  }
  // Number of inserted ranks < rank.
  std::int64_t below(std::size_t rank) const {
    std::int64_t s = 0;
    for (std::size_t i = rank; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<std::int64_t> tree_;
};

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double c_index(std::span<const std::int64_t> lifetimes, const std::vector<bool>& censored,
               std::span<const double> risk_scores) {
  const std::size_t n = lifetimes.size();
  if (censored.size() != n || risk_scores.size() != n) {
    throw DataError("c_index inputs must have equal length");
  }
  std::vector<double> sorted_risk(risk_scores.begin(), risk_scores.end());
  std::sort(sorted_risk.begin(), sorted_risk.end());
  sorted_risk.erase(std::unique(sorted_risk.begin(), sorted_risk.end()), sorted_risk.end());
  auto rank_of = [&](double r) {
    return static_cast<std::size_t>(std::lower_bound(sorted_risk.begin(), sorted_risk.end(), r) -
                                    sorted_risk.begin());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lifetimes[a] > lifetimes[b]; });

  // Subjects are inserted one lifetime group at a time, longest first, so
  // queries only see strictly longer lifetimes.
  RankCounter counter(sorted_risk.size());
  std::vector<std::int64_t> equal_count(sorted_risk.size(), 0);
  std::int64_t inserted = 0;
  double concordant = 0.0;
  double comparable = 0.0;
  for (std::size_t g = 0; g < n;) {
    std::size_t end = g;
    while (end < n && lifetimes[order[end]] == lifetimes[order[g]]) ++end;
    for (std::size_t p = g; p < end; ++p) {
      const auto i = order[p];
      if (censored[i]) continue;
      const auto rank = rank_of(risk_scores[i]);
      const auto lower = counter.below(rank);
      concordant += static_cast<double>(lower) + 0.5 * static_cast<double>(equal_count[rank]);
      comparable += static_cast<double>(inserted);
    }
    for (std::size_t p = g; p < end; ++p) {
      const auto rank = rank_of(risk_scores[order[p]]);
      counter.add(rank);
      ++equal_count[rank];
      ++inserted;
    }
    g = end;
  }
  if (comparable == 0.0) throw DataError("no comparable pairs");
  return concordant / comparable;
}

double integrated_brier(std::span<const std::int64_t> lifetimes, const std::vector<bool>& censored,
                        std::span<const EmpiricalLifetimeDistribution> cluster_curves,
                        std::span<const std::size_t> labels) {
  const std::size_t n = lifetimes.size();
  if (censored.size() != n || labels.size() != n) {
    throw DataError("integrated_brier inputs must have equal length");
  }
  if (cluster_curves.empty()) throw DataError("integrated_brier needs cluster curves");
  const std::size_t len = cluster_curves.front().size();

  // alive[k][m] = sum_{t<m} (1 - S)^2, dead[k][m] = sum_{t<m} S^2.
  std::vector<std::vector<double>> alive, dead;
  for (const auto& curve : cluster_curves) {
    if (curve.size() != len) throw DataError("cluster curves must share one time grid");
    std::vector<double> a(len + 1, 0.0), d(len + 1, 0.0);
    for (std::size_t t = 0; t < len; ++t) {
      const double s = curve.values[t];
      a[t + 1] = a[t] + (1.0 - s) * (1.0 - s);
      d[t + 1] = d[t] + s * s;
    }
    alive.push_back(std::move(a));
    dead.push_back(std::move(d));
  }

  double total = 0.0;
  std::size_t contributing = 0;
  for (std::size_t u = 0; u < n; ++u) {
    const auto k = labels[u];
    if (k >= cluster_curves.size()) throw DataError("label without a cluster curve");
    if (lifetimes[u] < 0) throw DataError("negative lifetime");
    const auto cut = std::min<std::size_t>(static_cast<std::size_t>(lifetimes[u]), len);
    if (censored[u]) {
      if (cut == 0) continue;
      total += alive[k][cut] / static_cast<double>(cut);
    } else {
      total += (alive[k][cut] + dead[k][len] - dead[k][cut]) / static_cast<double>(len);
    }
    ++contributing;
  }
  if (contributing == 0) throw DataError("no subjects contribute to the Brier score");
  return total / static_cast<double>(contributing);
}

double logrank(std::span<const std::int64_t> lifetimes, const std::vector<bool>& events,
               std::span<const std::size_t> labels, std::size_t groups) {
  const std::size_t n = lifetimes.size();
  if (events.size() != n || labels.size() != n) throw DataError("logrank inputs must have equal length");
  if (groups < 2) throw DataError("logrank needs at least two groups");

  std::vector<double> at_risk(groups, 0.0);
  for (const auto g : labels) {
    if (g >= groups) throw DataError("label outside [0, K)");
    at_risk[g] += 1.0;
  }
  for (const double c : at_risk) {
    if (c == 0.0) throw DataError("empty group");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return lifetimes[a] < lifetimes[b]; });

  const auto m = static_cast<Eigen::Index>(groups - 1);
  Eigen::VectorXd observed_minus_expected = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd variance = Eigen::MatrixXd::Zero(m, m);
  std::vector<double> died(groups), left(groups);
  for (std::size_t p = 0; p < n;) {
    std::size_t end = p;
    std::fill(died.begin(), died.end(), 0.0);
    std::fill(left.begin(), left.end(), 0.0);
    while (end < n && lifetimes[order[end]] == lifetimes[order[p]]) {
      const auto i = order[end];
      if (events[i]) died[labels[i]] += 1.0;
      left[labels[i]] += 1.0;
      ++end;
    }
    const double d = std::accumulate(died.begin(), died.end(), 0.0);
    const double r = std::accumulate(at_risk.begin(), at_risk.end(), 0.0);
    if (d > 0.0) {
      for (Eigen::Index k = 0; k < m; ++k) {
        const double share = at_risk[static_cast<std::size_t>(k)] / r;
        observed_minus_expected(k) += died[static_cast<std::size_t>(k)] - d * share;
        if (r > 1.0) {
          const double scale = d * (r - d) / (r - 1.0);
          for (Eigen::Index l = 0; l < m; ++l) {
            const double other = at_risk[static_cast<std::size_t>(l)] / r;
            variance(k, l) += scale * share * ((k == l ? 1.0 : 0.0) - other);
          }
        }
      }
    }
    for (std::size_t g = 0; g < groups; ++g) at_risk[g] -= left[g];
    p = end;
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(variance);
  Eigen::VectorXd solved;
  if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
      ldlt.vectorD().minCoeff() > 1e-12 * std::max(1.0, variance.diagonal().maxCoeff())) {
    solved = ldlt.solve(observed_minus_expected);
  } else {
    solved = variance.completeOrthogonalDecomposition().pseudoInverse() * observed_minus_expected;
  }
  return std::max(0.0, observed_minus_expected.dot(solved));
}

double adjusted_rand(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b) {
  if (labels_a.size() != labels_b.size()) throw DataError("label vectors differ in length");
  const auto n = static_cast<double>(labels_a.size());
  std::map<std::pair<std::size_t, std::size_t>, double> table;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    table[{labels_a[i], labels_b[i]}] += 1.0;
    rows[labels_a[i]] += 1.0;
    cols[labels_b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [cell, count] : table) index += choose2(count);
  for (const auto& [label, count] : rows) sum_rows += choose2(count);
  for (const auto& [label, count] : cols) sum_cols += choose2(count);
  const double total = choose2(n);
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double maximum = 0.5 * (sum_rows + sum_cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

double restricted_mean(const EmpiricalLifetimeDistribution& curve) {
  return std::accumulate(curve.values.begin(), curve.values.end(), 0.0);
}

}  // namespace deepclife
