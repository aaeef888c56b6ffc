#ifndef DEEPCLIFE_KAPLAN_MEIER_HPP_
#define DEEPCLIFE_KAPLAN_MEIER_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "deepclife/dataset.hpp"

namespace deepclife {

/// Discrete lifetime CCDF S[t] = P(T > t) for t = 0..t_max, plus the
/// (possibly fractional) number of subjects it was estimated from.
struct EmpiricalLifetimeDistribution {
  std::vector<double> values;
  double effective_n = 0.0;
  /// Set when the estimate had no member mass at all (effective_n == 0).
  bool degenerate = false;

  std::size_t size() const { return values.size(); }
};

/// Soft-membership Kaplan-Meier product-limit estimate.
///
/// With s[j] = sum_u 1[H_u >= j] alpha_u and d[j] = sum_u 1[H_u == j] beta_u
/// alpha_u, returns S[t] = prod_{j<=t} (s[j] - d[j]) / s[j]. Factors with an
/// empty risk set are 1, and effective_n = s[0].
EmpiricalLifetimeDistribution weighted_kaplan_meier(
    std::span<const std::int64_t> lifetimes, std::int64_t t_max,
    std::span<const double> alpha, std::span<const double> beta);

EmpiricalLifetimeDistribution weighted_kaplan_meier(
    const Dataset& data, std::span<const double> alpha,
    std::span<const double> beta);

/// Reverse-mode record of the per-cluster Kaplan-Meier estimates.
///
/// Forward values are bitwise identical to weighted_kaplan_meier applied
/// column by column. backward() maps upstream gradients on every S_k[t] and
/// on every effective_n_k to gradients on alpha (n x K) and beta (n).
class KaplanMeierTape {
 public:
  struct Gradients {
    Eigen::MatrixXd alpha;
    Eigen::VectorXd beta;
  };

  KaplanMeierTape(std::span<const std::int64_t> lifetimes, std::int64_t t_max,
                  const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                  std::span<const double> beta);

  const std::vector<EmpiricalLifetimeDistribution>& distributions() const {
    return distributions_;
  }
  std::size_t clusters() const { return distributions_.size(); }

  /// `value_grads[k]` has length t_max+1 (an empty vector means zero), and
  /// `n_grads[k]` is the upstream gradient on effective_n of cluster k.
  Gradients backward(std::span<const std::vector<double>> value_grads,
                     std::span<const double> n_grads) const;

 private:
  std::vector<std::int64_t> lifetimes_;
  Eigen::MatrixXd alpha_;
  std::vector<double> beta_;
  // Per cluster: at-risk mass s, expected terminations d, factors f.
  std::vector<std::vector<double>> at_risk_;
  std::vector<std::vector<double>> terminal_;
  std::vector<std::vector<double>> factors_;
  std::vector<EmpiricalLifetimeDistribution> distributions_;
};

KaplanMeierTape differentiable_km(const Dataset& data,
                                  const Eigen::Ref<const Eigen::MatrixXd>& alpha,
                                  std::span<const double> beta);

}  // namespace deepclife

#endif  // DEEPCLIFE_KAPLAN_MEIER_HPP_
