#ifndef DEEPCLIFE_METRICS_HPP_
#define DEEPCLIFE_METRICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "deepclife/kaplan_meier.hpp"

namespace deepclife {

/// Harrell's concordance index. A pair (i, j) is comparable when i is not
/// censored and T_i < T_j; it is concordant when risk_i > risk_j and counts
/// one half on a risk tie. Throws DataError("no comparable pairs").
double c_index(std::span<const std::int64_t> lifetimes, const std::vector<bool>& censored,
               std::span<const double> risk_scores);

/// Mean over subjects of (1/L) sum_t (1[T > t] - S_k(t))^2 where S_k is the
/// curve of the subject's cluster. Uncensored subjects use all L = t_max+1
/// time points; censored subjects average over t < T only, and those
/// censored at 0 do not contribute.
double integrated_brier(std::span<const std::int64_t> lifetimes, const std::vector<bool>& censored,
                        std::span<const EmpiricalLifetimeDistribution> cluster_curves,
                        std::span<const std::size_t> labels);

/// K-group logrank chi-square statistic (O - E)' V^{-1} (O - E) over the
/// first K-1 groups. Throws DataError("empty group") if a label in [0, K)
/// has no subjects.
double logrank(std::span<const std::int64_t> lifetimes, const std::vector<bool>& events,
               std::span<const std::size_t> labels, std::size_t groups);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand(std::span<const std::size_t> labels_a, std::span<const std::size_t> labels_b);

/// Restricted mean survival: sum over t of S[t].
double restricted_mean(const EmpiricalLifetimeDistribution& curve);

}  // namespace deepclife

#endif  // DEEPCLIFE_METRICS_HPP_
