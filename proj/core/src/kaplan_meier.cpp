#include "deepclife/kaplan_meier.hpp"

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

struct RiskSets {
  std::vector<double> at_risk;
  std::vector<double> terminal;
};

void check_inputs(std::span<const std::int64_t> lifetimes, std::int64_t t_max,
                  std::size_t alpha_rows, std::span<const double> beta) {
  if (lifetimes.empty()) throw DataError("Kaplan-Meier estimate of an empty dataset");
  if (t_max < 0) throw DataError("t_max must be nonnegative");
  if (alpha_rows != lifetimes.size() || beta.size() != lifetimes.size()) {
    throw DataError("membership and termination vectors must match the subjects");
  }
  for (const auto h : lifetimes) {
    if (h < 0 || h > t_max) throw DataError("observed lifetime outside [0, t_max]");
  }
  for (const double b : beta) {
    if (!(b >= 0.0 && b <= 1.0)) throw DataError("termination probability outside [0,1]");
  }
}

// `alpha_at(u)` returns the membership of subject u.
template <class AlphaAt>
RiskSets accumulate(std::span<const std::int64_t> lifetimes, std::int64_t t_max,
                    AlphaAt alpha_at, std::span<const double> beta) {
  const auto len = static_cast<std::size_t>(t_max) + 1;
  RiskSets r{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
  for (std::size_t u = 0; u < lifetimes.size(); ++u) {
    const double a = alpha_at(u);
    if (!(a >= 0.0 && a <= 1.0)) throw DataError("cluster membership outside [0,1]");
    const auto h = static_cast<std::size_t>(lifetimes[u]);
    r.at_risk[h] += a;
    r.terminal[h] += beta[u] * a;
  }
  // Suffix sums turn "exactly at h" masses into "at risk at j" masses.
  for (std::size_t j = len - 1; j-- > 0;) r.at_risk[j] += r.at_risk[j + 1];
  return r;
}

std::vector<double> factors_of(const RiskSets& r) {
  std::vector<double> f(r.at_risk.size(), 1.0);
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (r.at_risk[j] > 0.0) f[j] = (r.at_risk[j] - r.terminal[j]) / r.at_risk[j];
  }
  return f;
}

EmpiricalLifetimeDistribution product_limit(const RiskSets& r,
                                            const std::vector<double>& f) {
  EmpiricalLifetimeDistribution out;
  out.values.resize(f.size());
  double running = 1.0;
  for (std::size_t t = 0; t < f.size(); ++t) {
    running *= f[t];
    out.values[t] = running;
  }
  out.effective_n = r.at_risk[0];
  out.degenerate = !(out.effective_n > 0.0);
  return out;
}

}  // namespace

EmpiricalLifetimeDistribution weighted_kaplan_meier(
    std::span<const std::int64_t> lifetimes, std::int64_t t_max,
    std::span<const double> alpha, std::span<const double> beta) {
  check_inputs(lifetimes, t_max, alpha.size(), beta);
  const auto r = accumulate(lifetimes, t_max, [&](std::size_t u) { return alpha[u]; }, beta);
  return product_limit(r, factors_of(r));
}

EmpiricalLifetimeDistribution weighted_kaplan_meier(
    const Dataset& data, std::span<const double> alpha,
    std::span<const double> beta) {
  return weighted_kaplan_meier(data.observed_lifetimes(), data.t_max(), alpha, beta);
}

KaplanMeierTape::KaplanMeierTape(std::span<const std::int64_t> lifetimes,
                                 std::int64_t t_max,
                                 const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                                 std::span<const double> beta)
    : lifetimes_(lifetimes.begin(), lifetimes.end()),
      alpha_(alpha),
      beta_(beta.begin(), beta.end()) {
  check_inputs(lifetimes, t_max, static_cast<std::size_t>(alpha.rows()), beta);
  const auto k_count = static_cast<std::size_t>(alpha.cols());
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    auto r = accumulate(
        lifetimes, t_max,
        [&](std::size_t u) { return alpha_(static_cast<Eigen::Index>(u), col); }, beta);
    auto f = factors_of(r);
    distributions_.push_back(product_limit(r, f));
    at_risk_.push_back(std::move(r.at_risk));
    terminal_.push_back(std::move(r.terminal));
    factors_.push_back(std::move(f));
  }
}

KaplanMeierTape::Gradients KaplanMeierTape::backward(
    std::span<const std::vector<double>> value_grads,
    std::span<const double> n_grads) const {
  const auto n = static_cast<Eigen::Index>(lifetimes_.size());
  const auto k_count = distributions_.size();
  if (value_grads.size() != k_count || n_grads.size() != k_count) {
    throw DataError("upstream gradients must be given for every cluster");
  }
  Gradients g{Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(k_count)),
              Eigen::VectorXd::Zero(n)};

  for (std::size_t k = 0; k < k_count; ++k) {
    const auto& upstream = value_grads[k];
    const auto& f = factors_[k];
    const auto& s = at_risk_[k];
    const auto& d = terminal_[k];
    const auto& curve = distributions_[k].values;
    const std::size_t len = f.size();
    if (!upstream.empty() && upstream.size() != len) {
      throw DataError("upstream gradient length does not match the distribution");
    }

    // dL/df_j = S[j-1] * R_j with R_j = g[j] + f_{j+1} R_{j+1}; avoids
    // dividing by factors that may be exactly zero.
    std::vector<double> grad_s(len, 0.0), grad_d(len, 0.0);
    if (!upstream.empty()) {
      double tail = 0.0;
      for (std::size_t j = len; j-- > 0;) {
        tail = upstream[j] + (j + 1 < len ? f[j + 1] * tail : 0.0);
        const double prefix = j == 0 ? 1.0 : curve[j - 1];
        const double grad_f = prefix * tail;
        if (s[j] > 0.0) {
          grad_d[j] = -grad_f / s[j];
          grad_s[j] = grad_f * d[j] / (s[j] * s[j]);
        }
      }
    }
    grad_s[0] += n_grads[k];

    // s[j] collects alpha_u for every j <= H_u: prefix-sum grad_s.
    std::vector<double> cumulative(len);
    double acc = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      acc += grad_s[j];
      cumulative[j] = acc;
    }
    const auto col = static_cast<Eigen::Index>(k);
    for (Eigen::Index u = 0; u < n; ++u) {
      const auto h = static_cast<std::size_t>(lifetimes_[static_cast<std::size_t>(u)]);
      const double b = beta_[static_cast<std::size_t>(u)];
      g.alpha(u, col) += cumulative[h] + b * grad_d[h];
      g.beta(u) += alpha_(u, col) * grad_d[h];
    }
  }
  return g;
}

KaplanMeierTape differentiable_km(const Dataset& data,
                                  const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                                  std::span<const double> beta) {
  return KaplanMeierTape(data.observed_lifetimes(), data.t_max(), alpha, beta);
}

}  // namespace deepclife
