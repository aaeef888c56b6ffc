#include "deepclife/cross_validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x7f4a7c15u};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::string real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string percent(const MeanSe& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", 100.0 * m.mean, 100.0 * m.se);
  return buf;
}

std::string fixed2(const MeanSe& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f (%.2f)", m.mean, m.se);
  return buf;
}

template <class Get>
MeanSe aggregate(const std::vector<FoldResult>& folds, Get get) {
  std::vector<double> v;
  v.reserve(folds.size());
  for (const auto& f : folds) v.push_back(get(f));
  return mean_se(v);
}

void write_eval(std::ostream& out, const std::string& prefix, const EvalReport& r) {
  out << prefix << "c_index = " << real(r.c_index) << '\n';
  out << prefix << "ibs = " << real(r.ibs) << '\n';
  out << prefix << "logrank = " << real(r.logrank) << '\n';
  if (r.ari) out << prefix << "ari = " << real(*r.ari) << '\n';
  out << prefix << "cluster_sizes = ";
  for (std::size_t k = 0; k < r.cluster_sizes.size(); ++k) {
    out << (k ? ";" : "") << r.cluster_sizes[k];
  }
  out << '\n';
}

}  // namespace

MeanSe mean_se(std::span<const double> values) {
  MeanSe r;
  if (values.empty()) return r;
  const double n = static_cast<double>(values.size());
  r.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return r;
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (n < folds) throw ConfigError("fewer subjects than folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(seed, 0xf01d));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t i = 0; i < n; ++i) out[i % folds].push_back(order[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

CvResult cross_validate(const Dataset& data, const TrainConfig& config,
                        const CvOptions& options,
                        std::optional<std::span<const std::size_t>> truth) {
  config.validate();
  if (truth && truth->size() != data.size()) {
    throw DataError("ground-truth labels do not match the dataset size");
  }
  const auto folds = make_folds(data.size(), options.folds, config.seed);
  EvalOptions eval_options;
  eval_options.w_fixed = options.w_fixed;

  CvResult result;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const std::uint64_t fold_seed = derive_seed(config.seed, f + 1);
    std::vector<std::size_t> rest;
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
    }
    std::sort(rest.begin(), rest.end());
    std::mt19937_64 rng(fold_seed);
    if (options.n_train > 0 && options.n_train < rest.size()) {
      std::vector<std::size_t> sampled;
      std::sample(rest.begin(), rest.end(), std::back_inserter(sampled), options.n_train, rng);
      rest = std::move(sampled);
    }

    const Dataset training = data.subset(rest);
    std::vector<double> grid = options.l2_grid;
    if (grid.empty()) grid.push_back(config.l2);
    std::optional<TrainResult> trained;
    double trained_best = 0.0;
    for (const double l2 : grid) {
      TrainConfig fold_config = config;
      fold_config.seed = fold_seed;
      fold_config.l2 = l2;
      auto candidate = train(training, fold_config);
      const double best = candidate.log.empty()
                              ? -std::numeric_limits<double>::infinity()
                              : candidate.log.back().best_validation;
      if (!trained || best > trained_best) {
        trained = std::move(candidate);
        trained_best = best;
      }
    }

    const Dataset test = data.subset(folds[f]);
    const auto assignment = assign(trained->model, test);
    std::vector<std::size_t> test_truth;
    if (truth) {
      for (auto i : folds[f]) test_truth.push_back((*truth)[i]);
    }
    const auto truth_span = truth ? std::optional<std::span<const std::size_t>>(test_truth)
                                  : std::nullopt;

    FoldResult fr;
    fr.fold = f;
    fr.seed = fold_seed;
    fr.best_epoch = trained->best_epoch;
    fr.epochs_run = trained->log.size();
    fr.l2 = trained->model.config.l2;
    fr.best_validation = trained_best;
    fr.report = evaluate_clustering(test, assignment.labels, config.clusters, truth_span,
                                    eval_options);
    if (options.random_control) {
      std::mt19937_64 control_rng(derive_seed(fold_seed, 0xc0));
      std::uniform_int_distribution<std::size_t> pick(0, config.clusters - 1);
      std::vector<std::size_t> labels(test.size());
      for (auto& l : labels) l = pick(control_rng);
      fr.control = evaluate_clustering(test, labels, config.clusters, truth_span, eval_options);
    }
    result.folds.push_back(std::move(fr));
  }

  const auto& fs = result.folds;
  result.c_index = aggregate(fs, [](const FoldResult& f) { return f.report.c_index; });
  result.ibs = aggregate(fs, [](const FoldResult& f) { return f.report.ibs; });
  result.logrank = aggregate(fs, [](const FoldResult& f) { return f.report.logrank; });
  if (truth) {
    result.ari = aggregate(fs, [](const FoldResult& f) { return *f.report.ari; });
  }
  if (options.random_control) {
    result.control_c_index = aggregate(fs, [](const FoldResult& f) { return f.control->c_index; });
    if (truth) {
      result.control_ari = aggregate(fs, [](const FoldResult& f) { return *f.control->ari; });
    }
  }
  return result;
}

void write_cv_report(std::ostream& out, const CvResult& result) {
  out << "folds = " << result.folds.size() << '\n';
  for (const auto& f : result.folds) {
    const std::string p = "fold" + std::to_string(f.fold) + ".";
    out << p << "seed = " << f.seed << '\n';
    out << p << "best_epoch = " << f.best_epoch << '\n';
    out << p << "epochs_run = " << f.epochs_run << '\n';
    out << p << "l2 = " << real(f.l2) << '\n';
    out << p << "best_validation = " << real(f.best_validation) << '\n';
    write_eval(out, p, f.report);
    if (f.control) write_eval(out, p + "control.", *f.control);
  }
  auto line = [&](const std::string& key, const MeanSe& m) {
    out << key << ".mean = " << real(m.mean) << '\n';
    out << key << ".se = " << real(m.se) << '\n';
  };
  line("c_index", result.c_index);
  line("ibs", result.ibs);
  line("logrank", result.logrank);
  if (result.ari) line("ari", *result.ari);
  if (result.control_c_index) line("control.c_index", *result.control_c_index);
  if (result.control_ari) line("control.ari", *result.control_ari);

  out << "table = ";
  if (result.ari) out << "ARI " << percent(*result.ari) << " | ";
  out << "C-index " << percent(result.c_index) << " | IBS " << percent(result.ibs)
      << " | Logrank " << fixed2(result.logrank) << '\n';
}

}  // namespace deepclife
