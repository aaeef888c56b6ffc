#ifndef DEEPCLIFE_EVALUATION_HPP_
#define DEEPCLIFE_EVALUATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "deepclife/dataset.hpp"
#include "deepclife/kaplan_meier.hpp"

namespace deepclife {

struct EvalReport {
  double c_index = 0.5;
  double ibs = 0.0;
  double logrank = 0.0;
  std::optional<double> ari;
  std::vector<std::size_t> cluster_sizes;
};

struct EvalOptions {
  /// Timeout used to derive termination flags when the data has none.
  std::int64_t w_fixed = 10;
};

/// Terminal-event indicators used for evaluation: recorded flags when every
/// subject has them, otherwise 1[chi > w_fixed].
std::vector<bool> evaluation_events(const Dataset& data, const EvalOptions& options);

/// Hard-membership Kaplan-Meier curve per cluster on the dataset's time grid.
/// Empty clusters get an all-ones degenerate curve.
std::vector<EmpiricalLifetimeDistribution> cluster_curves(
    const Dataset& data, std::span<const std::size_t> labels, std::size_t clusters,
    const std::vector<bool>& events);

/// Scores a hard clustering of `data`. The per-subject risk score is minus
/// the restricted mean survival of its cluster's curve. Logrank is computed
/// over the nonempty clusters and is 0 when fewer than two are nonempty.
EvalReport evaluate_clustering(const Dataset& data, std::span<const std::size_t> labels,
                               std::size_t clusters,
                               std::optional<std::span<const std::size_t>> truth,
                               const EvalOptions& options = {},
                               std::vector<EmpiricalLifetimeDistribution>* curves_out = nullptr);

/// Flat `key = value` report.
void write_report(std::ostream& out, const EvalReport& report);

/// CSV with columns t, S_0, ..., S_{K-1}.
void write_curves_csv(std::ostream& out, std::span<const EmpiricalLifetimeDistribution> curves);

}  // namespace deepclife

#endif  // DEEPCLIFE_EVALUATION_HPP_
