#include "deepclife/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepclife/error.hpp"
#include "deepclife/kuiper.hpp"

namespace deepclife {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

DeltaResult kuiper_delta(const DivergenceSpec& spec, const KuiperUB& kind,
                         const EmpiricalLifetimeDistribution& s_a,
                         const EmpiricalLifetimeDistribution& s_b) {
  const std::size_t len = s_a.size();
  DeltaResult out{0.0, std::vector<double>(len, 0.0), std::vector<double>(len, 0.0), 0.0, 0.0};
  const auto stat = kuiper_statistic(s_a, s_b);
  const double lambda = lambda_of(stat.v_stat, s_a.effective_n, s_b.effective_n);
  if (lambda == 0.0) {
    if (!kind.clamp) out.value = -log_kd_upper_unclamped_at_zero();
    return out;
  }

  const auto bound = log_kd_upper_grad(lambda, kind.clamp);
  out.value = -bound.value;
  const double dvalue_dlambda = -bound.d_dlambda;
  if (dvalue_dlambda == 0.0) return out;

  const auto dl = lambda_gradient(stat.v_stat, s_a.effective_n, s_b.effective_n);
  const double dv = dvalue_dlambda * dl.d_v;
  if (stat.argmax_plus) {
    out.grad_a[*stat.argmax_plus] += dv;
    out.grad_b[*stat.argmax_plus] -= dv;
  }
  if (stat.argmax_minus) {
    out.grad_b[*stat.argmax_minus] += dv;
    out.grad_a[*stat.argmax_minus] -= dv;
  }
  if (spec.grad_through_n) {
    out.grad_na = dvalue_dlambda * dl.d_na;
    out.grad_nb = dvalue_dlambda * dl.d_nb;
  }
  return out;
}

// p[t] = S[t-1] - S[t] for t <= t_max (S[-1] = 1) and p[t_max+1] = S[t_max],
// the mass still alive at the horizon.
std::vector<double> implied_pmf(const std::vector<double>& ccdf) {
  std::vector<double> p(ccdf.size() + 1);
  double previous = 1.0;
  for (std::size_t t = 0; t < ccdf.size(); ++t) {
    p[t] = previous - ccdf[t];
    previous = ccdf[t];
  }
  p.back() = previous;
  return p;
}

DeltaResult mmd_delta(const MMD& mmd, const EmpiricalLifetimeDistribution& s_a,
                      const EmpiricalLifetimeDistribution& s_b) {
  if (s_a.size() != s_b.size()) throw DataError("MMD needs distributions of equal length");
  const std::size_t len = s_a.size();
  const std::size_t support = len + 1;
  const double h = mmd.bandwidth > 0.0 ? mmd.bandwidth : median_time_gap(support);

  std::vector<double> kernel(support);
  for (std::size_t g = 0; g < support; ++g) {
    const double x = static_cast<double>(g) / h;
    kernel[g] = std::exp(-0.5 * x * x);
  }
  const auto pa = implied_pmf(s_a.values);
  const auto pb = implied_pmf(s_b.values);
  std::vector<double> diff(support);
  for (std::size_t t = 0; t < support; ++t) diff[t] = pa[t] - pb[t];

  // K diff, with K[s][t] = kernel[|s - t|].
  std::vector<double> k_diff(support, 0.0);
  for (std::size_t s = 0; s < support; ++s) {
    double acc = 0.0;
    for (std::size_t t = 0; t < support; ++t) {
      acc += kernel[s > t ? s - t : t - s] * diff[t];
    }
    k_diff[s] = acc;
  }
  DeltaResult out{0.0, std::vector<double>(len), std::vector<double>(len), 0.0, 0.0};
  for (std::size_t t = 0; t < support; ++t) out.value += diff[t] * k_diff[t];
  out.value = std::max(0.0, out.value);

  // d/dpa = 2 K diff; S[t] enters p[t] with -1 and p[t+1] with +1.
  for (std::size_t t = 0; t < len; ++t) {
    const double g = 2.0 * (k_diff[t + 1] - k_diff[t]);
    out.grad_a[t] = g;
    out.grad_b[t] = -g;
  }
  return out;
}

}  // namespace

PairSampling default_pair_sampling(std::size_t clusters) {
  if (clusters <= 8) return AllPairs{};
  return SampleWithoutReplacement{clusters};
}

DeltaResult delta(const DivergenceSpec& spec,
                  const EmpiricalLifetimeDistribution& s_a,
                  const EmpiricalLifetimeDistribution& s_b) {
  if (s_a.size() != s_b.size()) throw DataError("divergence needs aligned distributions");
  if (!(s_a.effective_n > 0.0) || !(s_b.effective_n > 0.0)) {
    throw NumericalError("degenerate cluster");
  }
  return std::visit(Overloaded{[&](const KuiperUB& k) { return kuiper_delta(spec, k, s_a, s_b); },
                               [&](const MMD& m) { return mmd_delta(m, s_a, s_b); }},
                    spec.kind);
}

double median_time_gap(std::size_t support_size) {
  if (support_size < 2) return 1.0;
  // Gap g occurs (N - g) times among the N (N - 1) / 2 pairs.
  const std::size_t n = support_size;
  const std::size_t total = n * (n - 1) / 2;
  const std::size_t lower_rank = (total - 1) / 2;  // 0-based
  const std::size_t upper_rank = total / 2;
  std::size_t seen = 0;
  double lower = 0.0, upper = 0.0;
  bool have_lower = false;
  for (std::size_t g = 1; g < n; ++g) {
    seen += n - g;
    if (!have_lower && seen > lower_rank) {
      lower = static_cast<double>(g);
      have_lower = true;
    }
    if (seen > upper_rank) {
      upper = static_cast<double>(g);
      break;
    }
  }
  return 0.5 * (lower + upper);
}

std::size_t pair_count(std::size_t clusters) {
  return clusters * (clusters - (clusters > 0 ? 1 : 0)) / 2;
}

std::pair<std::size_t, std::size_t> pair_at(std::size_t index, std::size_t clusters) {
  for (std::size_t i = 0; i + 1 < clusters; ++i) {
    const std::size_t row = clusters - 1 - i;
    if (index < row) return {i, i + 1 + index};
    index -= row;
  }
  throw ConfigError("pair index out of range");
}

std::size_t argmin_pair(std::span<const PairValue> values) {
  if (values.empty()) throw NumericalError("no cluster pairs to reduce");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    const auto& c = values[i];
    const auto& b = values[best];
    if (c.value < b.value || (c.value == b.value && c.pair_index < b.pair_index)) best = i;
  }
  return best;
}

PairObjective min_pair_objective(
    const DivergenceSpec& spec,
    std::span<const EmpiricalLifetimeDistribution> distributions,
    std::mt19937_64* rng, double skip_below_n) {
  const std::size_t k = distributions.size();
  if (k < 2) throw ConfigError("the pair objective needs at least two clusters");
  const std::size_t total = pair_count(k);

  std::vector<std::size_t> selected(total);
  std::iota(selected.begin(), selected.end(), std::size_t{0});
  if (const auto* sample = std::get_if<SampleWithoutReplacement>(&spec.sampling)) {
    if (sample->count == 0 || sample->count > total) {
      throw ConfigError("pair sample count must be in [1, K(K-1)/2]");
    }
    if (rng == nullptr) throw ConfigError("pair sampling needs a random generator");
    std::vector<std::size_t> picked;
    picked.reserve(sample->count);
    std::sample(selected.begin(), selected.end(), std::back_inserter(picked),
                static_cast<std::ptrdiff_t>(sample->count), *rng);
    selected = std::move(picked);
  }

  PairObjective out;
  std::vector<DeltaResult> deltas;
  for (const auto index : selected) {
    const auto [a, b] = pair_at(index, k);
    if (skip_below_n > 0.0 && (distributions[a].effective_n < skip_below_n ||
                               distributions[b].effective_n < skip_below_n)) {
      ++out.skipped;
      continue;
    }
    deltas.push_back(delta(spec, distributions[a], distributions[b]));
    out.evaluated.push_back({index, deltas.back().value});
  }
  if (out.evaluated.empty()) return out;

  const auto best = argmin_pair(out.evaluated);
  out.value = out.evaluated[best].value;
  std::tie(out.cluster_a, out.cluster_b) = pair_at(out.evaluated[best].pair_index, k);
  out.argmin_delta = std::move(deltas[best]);
  return out;
}

}  // namespace deepclife
