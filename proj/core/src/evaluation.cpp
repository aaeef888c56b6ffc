#include "deepclife/evaluation.hpp"

#include <cstdio>
#include <ostream>

#include "deepclife/error.hpp"
#include "deepclife/metrics.hpp"

namespace deepclife {

namespace {

std::string real_text(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::vector<bool> evaluation_events(const Dataset& data, const EvalOptions& options) {
  std::vector<bool> events(data.size());
  const bool recorded = data.has_termination_signals();
  for (std::size_t i = 0; i < data.size(); ++i) {
    events[i] = recorded ? *data[i].last_termination_flag()
                         : data.inactive_period(i) > options.w_fixed;
  }
  return events;
}

std::vector<EmpiricalLifetimeDistribution> cluster_curves(
    const Dataset& data, std::span<const std::size_t> labels, std::size_t clusters,
    const std::vector<bool>& events) {
  if (labels.size() != data.size() || events.size() != data.size()) {
    throw DataError("labels and events must match the dataset");
  }
  std::vector<double> beta(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) beta[i] = events[i] ? 1.0 : 0.0;
  std::vector<EmpiricalLifetimeDistribution> curves;
  std::vector<double> alpha(data.size());
  for (std::size_t k = 0; k < clusters; ++k) {
    for (std::size_t i = 0; i < data.size(); ++i) alpha[i] = labels[i] == k ? 1.0 : 0.0;
    curves.push_back(weighted_kaplan_meier(data, alpha, beta));
  }
  return curves;
}

EvalReport evaluate_clustering(const Dataset& data, std::span<const std::size_t> labels,
                               std::size_t clusters,
                               std::optional<std::span<const std::size_t>> truth,
                               const EvalOptions& options,
                               std::vector<EmpiricalLifetimeDistribution>* curves_out) {
  if (data.empty()) throw DataError("cannot evaluate an empty dataset");
  if (labels.size() != data.size()) throw DataError("labels must match the dataset");
  for (const auto l : labels) {
    if (l >= clusters) throw DataError("label outside [0, K)");
  }

  const auto events = evaluation_events(data, options);
  auto curves = cluster_curves(data, labels, clusters, events);

  EvalReport report;
  report.cluster_sizes.assign(clusters, 0);
  for (const auto l : labels) ++report.cluster_sizes[l];

  const auto lifetimes = data.observed_lifetimes();
  std::vector<bool> censored(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) censored[i] = !events[i];

  std::vector<double> cluster_risk(clusters);
  for (std::size_t k = 0; k < clusters; ++k) cluster_risk[k] = -restricted_mean(curves[k]);
  std::vector<double> risk(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) risk[i] = cluster_risk[labels[i]];

  report.c_index = c_index(lifetimes, censored, risk);
  report.ibs = integrated_brier(lifetimes, censored, curves, labels);

  std::vector<std::size_t> compact(clusters, clusters);
  std::size_t nonempty = 0;
  for (std::size_t k = 0; k < clusters; ++k) {
    if (report.cluster_sizes[k] > 0) compact[k] = nonempty++;
  }
  if (nonempty >= 2) {
    std::vector<std::size_t> relabeled(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) relabeled[i] = compact[labels[i]];
    report.logrank = logrank(lifetimes, events, relabeled, nonempty);
  }
  if (truth) {
    if (truth->size() != labels.size()) throw DataError("ground-truth labels must match the dataset");
    report.ari = adjusted_rand(labels, *truth);
  }
  if (curves_out) *curves_out = std::move(curves);
  return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
  out << "c_index = " << real_text(report.c_index) << '\n';
  out << "ibs = " << real_text(report.ibs) << '\n';
  out << "logrank = " << real_text(report.logrank) << '\n';
  if (report.ari) out << "ari = " << real_text(*report.ari) << '\n';
  out << "clusters = " << report.cluster_sizes.size() << '\n';
  for (std::size_t k = 0; k < report.cluster_sizes.size(); ++k) {
    out << "cluster_size_" << k << " = " << report.cluster_sizes[k] << '\n';
  }
}

void write_curves_csv(std::ostream& out, std::span<const EmpiricalLifetimeDistribution> curves) {
  out << 't';
  for (std::size_t k = 0; k < curves.size(); ++k) out << ",S_" << k;
  out << '\n';
  const std::size_t len = curves.empty() ? 0 : curves.front().size();
  for (std::size_t t = 0; t < len; ++t) {
    out << t;
    for (const auto& c : curves) out << ',' << real_text(c.values[t]);
    out << '\n';
  }
}

}  // namespace deepclife
