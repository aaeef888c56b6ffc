#ifndef DEEPCLIFE_DIVERGENCE_HPP_
#define DEEPCLIFE_DIVERGENCE_HPP_

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "deepclife/kaplan_meier.hpp"

namespace deepclife {

/// -log of the Kuiper p-value upper bound; accounts for sample sizes.
/// Without the clamp the bound is used as a raw closed form, which keeps a
/// gradient when the curves are still close (the p-value bound exceeds 1).
struct KuiperUB {
  bool clamp = true;
};

/// Squared maximum mean discrepancy between the implied lifetime PMFs with a
/// Gaussian kernel on the time axis. bandwidth <= 0 selects the median
/// pairwise time gap of the support.
struct MMD {
  double bandwidth = 0.0;
};

using DivergenceKind = std::variant<KuiperUB, MMD>;

struct AllPairs {};
struct SampleWithoutReplacement {
  std::size_t count = 1;
};
using PairSampling = std::variant<AllPairs, SampleWithoutReplacement>;

struct DivergenceSpec {
  DivergenceKind kind = KuiperUB{};
  PairSampling sampling = AllPairs{};
  /// Let gradients reach the effective sample sizes (KuiperUB only).
  bool grad_through_n = true;
};

/// All pairs for K <= 8, otherwise K pairs sampled without replacement.
PairSampling default_pair_sampling(std::size_t clusters);

struct DeltaResult {
  double value = 0.0;
  std::vector<double> grad_a;  // d value / d S_a[t]
  std::vector<double> grad_b;  // d value / d S_b[t]
  double grad_na = 0.0;
  double grad_nb = 0.0;
};

/// Divergence between two aligned CCDFs with gradients. Throws
/// NumericalError("degenerate cluster") when an effective_n is not positive.
DeltaResult delta(const DivergenceSpec& spec,
                  const EmpiricalLifetimeDistribution& s_a,
                  const EmpiricalLifetimeDistribution& s_b);

/// Median of |s - t| over all pairs s < t of {0, ..., support_size - 1}.
double median_time_gap(std::size_t support_size);

/// Number of unordered pairs of K clusters and the pair at a given index in
/// lexicographic order (0,1), (0,2), ..., (1,2), ...
std::size_t pair_count(std::size_t clusters);
std::pair<std::size_t, std::size_t> pair_at(std::size_t index, std::size_t clusters);

struct PairValue {
  std::size_t pair_index = 0;
  double value = 0.0;
};

/// Position (within `values`) of the smallest value; ties go to the lowest
/// pair index. Throws if `values` is empty.
std::size_t argmin_pair(std::span<const PairValue> values);

struct PairObjective {
  /// Min over the evaluated pairs; empty when every pair was skipped.
  std::optional<double> value;
  std::size_t cluster_a = 0;
  std::size_t cluster_b = 0;
  DeltaResult argmin_delta;
  std::vector<PairValue> evaluated;
  std::size_t skipped = 0;
};

/// min over selected cluster pairs of delta(S_i, S_j). Pairs in which either
/// effective_n is below `skip_below_n` are skipped (0 disables skipping, in
/// which case degenerate clusters raise). `rng` drives pair sampling and may
/// be null only for AllPairs.
PairObjective min_pair_objective(
    const DivergenceSpec& spec,
    std::span<const EmpiricalLifetimeDistribution> distributions,
    std::mt19937_64* rng = nullptr, double skip_below_n = 0.0);

}  // namespace deepclife

#endif  // DEEPCLIFE_DIVERGENCE_HPP_
