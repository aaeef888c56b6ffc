// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Tolerances and limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "deepclife/cross_validation.hpp"
#include "deepclife/divergence.hpp"
#include "deepclife/kaplan_meier.hpp"
#include "deepclife/kuiper.hpp"
#include "deepclife/metrics.hpp"
#include "deepclife/synth.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace deepclife;
namespace fs = std::filesystem;

namespace {

constexpr double kSandwichSlack = 1e-12;
constexpr double kSandwichSeconds = 1.0;
constexpr double kKmTolerance = 1e-12;
constexpr double kKmSeconds = 5.0;
constexpr double kGradientStep = 1e-5;
constexpr double kGradientTolerance = 1e-3;
// Relative errors use max(|analytic|, |numeric|, floor) as denominator.
constexpr double kGradientFloor = 1e-7;
constexpr double kGradientSeconds = 30.0;
constexpr double kRecoveryAri = 0.90;
constexpr double kControlMargin = 0.05;
constexpr double kSecondsPerFold = 15.0 * 60.0;
constexpr int kCrossingSeeds = 5;
constexpr int kCrossingWins = 4;
constexpr double kMetricTolerance = 1e-12;
constexpr std::size_t kSynthPerCluster = 2000;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Verdict bound_sandwich() {
  const auto start = std::chrono::steady_clock::now();
  int violations = 0;
  double worst = -INFINITY;
  for (int i = 1; i <= 1000; ++i) {
    const double lambda = 0.5 + 4.5 * i / 1000.0;
    const double lo = kd_lower_bound(lambda), ref = kd_reference(lambda, 10000),
                 up = kd_upper_bound(lambda);
    worst = std::max({worst, lo - ref, ref - up});
    if (lo > ref + kSandwichSlack || ref > up + kSandwichSlack) ++violations;
  }
  const double secs = seconds_since(start);
  return {violations == 0 && secs < kSandwichSeconds,
          format("1000 lambdas in (0.5, 5], %d violations, worst excess %.3g, %.3f s", violations,
                 worst, secs)};
}

Verdict km_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  std::bernoulli_distribution censor(0.35);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    const auto t_max = std::uniform_int_distribution<std::int64_t>(0, 40)(rng);
    std::uniform_int_distribution<std::int64_t> life(0, t_max);
    std::vector<std::int64_t> h(n);
    std::vector<bool> died(n);
    std::vector<double> beta(n);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = life(rng);
      died[i] = !censor(rng);
      beta[i] = died[i] ? 1.0 : 0.0;
    }
    const auto km = weighted_kaplan_meier(h, t_max, std::vector<double>(n, 1.0), beta);
    const auto ref = oracle::kaplan_meier(h, died, t_max);
    for (std::size_t t = 0; t < ref.size(); ++t) {
      worst = std::max(worst, std::abs(km.values[t] - ref[t]));
    }
  }
  const double secs = seconds_since(start);
  return {worst <= kKmTolerance && secs < kKmSeconds,
          format("200 datasets, max |difference| %.3g, %.3f s", worst, secs)};
}

Verdict gradient_check() {
  const auto start = std::chrono::steady_clock::now();
  const auto x = fixture::gradient_instance(20240);
  const auto check = fixture::check_loss_gradient(x.params, x.batch, x.config,
                                                  TerminationChoice::kLearnable, kGradientStep,
                                                  kGradientFloor);
  const double log_rate_error =
      oracle::relative_error(check.analytic_log_rate, check.numeric_log_rate, kGradientFloor);
  const double secs = seconds_since(start);
  return {check.worst_relative_error < kGradientTolerance && log_rate_error < kGradientTolerance &&
              check.analytic_log_rate != 0.0 && secs < kGradientSeconds,
          format("%ld parameters, worst relative error %.3g, log_rate %.6g vs %.6g, %.3f s",
                 static_cast<long>(check.checked), check.worst_relative_error,
                 check.analytic_log_rate, check.numeric_log_rate, secs)};
}

CvResult run_cv(const SyntheticData& synth, TrainConfig config, const CvOptions& options) {
  return cross_validate(synth.data, config, options, std::span<const std::size_t>(synth.labels));
}

SyntheticData synth_of(std::vector<SynthCluster> clusters, std::uint64_t seed) {
  SynthSpec spec;
  spec.clusters = std::move(clusters);
  spec.n_per_cluster = kSynthPerCluster;
  spec.seed = seed;
  return generate(spec);
}

Verdict two_cluster_recovery() {
  const auto synth = synth_of({SynthCluster::kC1, SynthCluster::kC3}, 1);
  TrainConfig config;
  config.seed = 1;
  config.event_features = false;
  CvOptions options;
  options.random_control = true;
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_cv(synth, config, options);
  const double per_fold = seconds_since(start) / static_cast<double>(options.folds);
  const double margin = r.c_index.mean - r.control_c_index->mean;
  return {r.ari->mean >= kRecoveryAri && margin >= kControlMargin && per_fold < kSecondsPerFold,
          format("ARI %.4f (%.4f), C-index %.4f vs control %.4f (+%.4f), %.1f s per fold",
                 r.ari->mean, r.ari->se, r.c_index.mean, r.control_c_index->mean, margin,
                 per_fold)};
}

Verdict crossing_curves() {
  int wins = 0;
  std::string per_seed;
  for (int seed = 1; seed <= kCrossingSeeds; ++seed) {
    const auto synth = synth_of({SynthCluster::kC1, SynthCluster::kC2, SynthCluster::kC3},
                                static_cast<std::uint64_t>(seed));
    TrainConfig config;
    config.clusters = 3;
    config.seed = static_cast<std::uint64_t>(seed);
    config.event_features = false;
    CvOptions options;
    options.l2_grid = {1e-2, 0.0};
    const auto kuiper = run_cv(synth, config, options);
    config.divergence = MMD{};
    const auto mmd = run_cv(synth, config, options);
    if (kuiper.ari->mean > mmd.ari->mean) ++wins;
    per_seed += format(" %d:%.3f/%.3f", seed, kuiper.ari->mean, mmd.ari->mean);
  }
  return {wins >= kCrossingWins,
          format("KuiperUB beats MMD on %d/%d seeds (ARI kuiper/mmd%s)", wins, kCrossingSeeds,
                 per_seed.c_str())};
}

Verdict sample_size_sensitivity() {
  EmpiricalLifetimeDistribution a{{1.0, 0.8, 0.3, 0.1}, 50.0, false};
  EmpiricalLifetimeDistribution b{{1.0, 0.5, 0.45, 0.2}, 80.0, false};
  const DivergenceSpec kuiper{KuiperUB{}, AllPairs{}, true};
  const DivergenceSpec mmd{MMD{}, AllPairs{}, true};
  const double v = kuiper_statistic(a, b).v_stat;
  const double k1 = delta(kuiper, a, b).value, m1 = delta(mmd, a, b).value;
  a.effective_n *= 4;
  b.effective_n *= 4;
  const double k4 = delta(kuiper, a, b).value, m4 = delta(mmd, a, b).value;
  return {v > 0.0 && k4 > k1 && m4 == m1,
          format("V %.3g, KuiperUB %.6g -> %.6g, MMD %.9g -> %.9g", v, k1, k4, m1, m4)};
}

Verdict metric_oracles() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> life(0, 9);
  std::bernoulli_distribution censor(0.3);
  std::uniform_int_distribution<int> coarse(0, 5);
  std::uniform_real_distribution<double> unit;
  double worst_c = 0.0, worst_b = 0.0, worst_l = 0.0, worst_a = 0.0;
  int counts[4] = {0, 0, 0, 0};
  while (counts[0] < 100 || counts[1] < 100 || counts[2] < 100 || counts[3] < 100) {
    const std::size_t n = 2 + rng() % 11;
    const std::size_t groups = 2 + rng() % 2;
    std::vector<std::int64_t> t(n);
    std::vector<bool> censored(n), events(n);
    std::vector<double> risk(n);
    std::vector<std::size_t> labels(n), other(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = life(rng);
      censored[i] = censor(rng);
      events[i] = !censored[i];
      risk[i] = coarse(rng) * 0.25;
      labels[i] = i < groups ? i : rng() % groups;
      other[i] = rng() % 4;
    }
    if (counts[0] < 100) {
      const double ref = oracle::c_index(t, censored, risk);
      if (std::isfinite(ref)) {
        worst_c = std::max(worst_c, std::abs(c_index(t, censored, risk) - ref));
        ++counts[0];
      }
    }
    if (counts[1] < 100) {
      std::vector<std::vector<double>> raw;
      std::vector<EmpiricalLifetimeDistribution> curves;
      for (std::size_t k = 0; k < groups; ++k) {
        std::vector<double> v(10);
        for (auto& s : v) s = unit(rng);
        std::sort(v.rbegin(), v.rend());
        raw.push_back(v);
        curves.push_back({v, 1.0, false});
      }
      const double ref = oracle::integrated_brier(t, censored, raw, labels);
      if (std::isfinite(ref)) {
        worst_b = std::max(worst_b, std::abs(integrated_brier(t, censored, curves, labels) - ref));
        ++counts[1];
      }
    }
    if (counts[2] < 100) {
      const double ref = oracle::logrank(t, events, labels, groups);
      if (std::isfinite(ref)) {
        worst_l = std::max(worst_l, std::abs(logrank(t, events, labels, groups) - ref));
        ++counts[2];
      }
    }
    if (counts[3] < 100) {
      worst_a = std::max(worst_a, std::abs(adjusted_rand(labels, other) -
                                           oracle::adjusted_rand(labels, other)));
      ++counts[3];
    }
  }
  const double worst = std::max({worst_c, worst_b, worst_l, worst_a});
  return {worst <= kMetricTolerance,
          format("100 instances each, max |difference| c_index %.3g, brier %.3g, logrank %.3g, "
                 "ari %.3g",
                 worst_c, worst_b, worst_l, worst_a)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int invoke(std::vector<std::string> args, std::string& err_text) {
  args.insert(args.begin(), "deepclife");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  err_text = err.str();
  return code;
}

Verdict cv_determinism() {
  const fs::path dir = fs::temp_directory_path() / "deepclife_acceptance_cv";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string err;
  const auto data = (dir / "data.csv").string();
  if (invoke({"synth", "--clusters", "C1,C3", "--n", "300", "--seed", "11", "--out", data}, err) !=
      cli::kExitOk) {
    return {false, "synth failed: " + err};
  }
  const std::vector<std::string> common{"cv",       "--data",   data,    "--tm",
                                        "150",      "--truth",  (dir / "data.labels.csv").string(),
                                        "--seed",   "11",       "--event-features", "false",
                                        "--control"};
  std::vector<std::string> reports;
  for (const char* name : {"a", "b"}) {
    auto args = common;
    args.insert(args.end(), {"--out", (dir / name).string()});
    if (invoke(args, err) != cli::kExitOk) return {false, "cv failed: " + err};
    reports.push_back(slurp(dir / name / "report.txt"));
  }
  fs::remove_all(dir);
  const bool same = reports[0] == reports[1] && !reports[0].empty();
  return {same, format("two cv runs, report.txt %zu bytes each, %s", reports[0].size(),
                       same ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "bound sandwich", bound_sandwich},
      {2, "Kaplan-Meier oracle equivalence", km_oracle},
      {3, "end-to-end gradient check", gradient_check},
      {4, "two-cluster recovery on D{C1,C3}", two_cluster_recovery},
      {5, "crossing curves on D{C1,C2,C3}", crossing_curves},
      {6, "sample-size sensitivity", sample_size_sensitivity},
      {7, "metric oracles", metric_oracles},
      {8, "cv determinism", cv_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
