#ifndef DEEPCLIFE_KUIPER_HPP_
#define DEEPCLIFE_KUIPER_HPP_

#include <cstddef>
#include <optional>

#include "deepclife/kaplan_meier.hpp"

namespace deepclife {

/// Default number of series terms for the reference p-value.
inline constexpr int kReferenceTerms = 10000;

/// Below this lambda the reference series is reported as 1.
inline constexpr double kReferenceLambdaFloor = 0.4;

/// One-sided maximal separations between two CCDFs and their argmax times.
struct KuiperStatistic {
  double d_plus = 0.0;   // max_t (S_a[t] - S_b[t]), clamped at 0
  double d_minus = 0.0;  // max_t (S_b[t] - S_a[t]), clamped at 0
  double v_stat = 0.0;   // d_plus + d_minus
  /// Time index attaining d_plus / d_minus; empty when the clamp is active.
  std::optional<std::size_t> argmax_plus;
  std::optional<std::size_t> argmax_minus;
};

struct KuiperResult {
  double d_plus = 0.0;
  double d_minus = 0.0;
  double v_stat = 0.0;
  double effective_m = 0.0;
  double lambda = 0.0;
  double p_upper = 1.0;
  double p_lower = 1.0;
  std::optional<double> p_reference;
};

KuiperStatistic kuiper_statistic(const EmpiricalLifetimeDistribution& s_a,
                                 const EmpiricalLifetimeDistribution& s_b);

/// M = n_a n_b / (n_a + n_b).
double effective_sample_size(double n_a, double n_b);

/// lambda = (sqrt(M) + 0.155 + 0.24 / sqrt(M)) V.
double lambda_of(double v_stat, double n_a, double n_b);

/// Partial derivatives of lambda_of with respect to V, n_a and n_b.
struct LambdaGradient {
  double d_v = 0.0;
  double d_na = 0.0;
  double d_nb = 0.0;
};
LambdaGradient lambda_gradient(double v_stat, double n_a, double n_b);

/// Series 2 sum_{j=1}^{terms} (4 j^2 l^2 - 1) exp(-2 j^2 l^2), clamped to
/// [0, 1]; returns 1 for lambda < kReferenceLambdaFloor.
double kd_reference(double lambda, int terms = kReferenceTerms);

/// Closed-form upper bound on the Kuiper p-value, clamped at 1.
double kd_upper_bound(double lambda);

/// Closed-form lower bound on the Kuiper p-value, clamped at 0 (1 at lambda=0).
double kd_lower_bound(double lambda);

struct LogBound {
  double value = 0.0;       // log kd_upper_bound(lambda)
  double d_dlambda = 0.0;   // derivative of the active branch
};

/// log of the upper bound and its derivative in lambda. The floor/ceil
/// indices are held fixed; in the clamped region the derivative is 0.
/// With clamp = false the min(1, .) is dropped and the raw closed form is
/// returned, so the value may exceed 0. Throws NumericalError for lambda <= 0.
LogBound log_kd_upper_grad(double lambda, bool clamp = true);

/// log of the unclamped closed form in the limit lambda -> 0.
double log_kd_upper_unclamped_at_zero();

/// Full two-sample report between two CCDFs using their effective_n.
KuiperResult kuiper_test(const EmpiricalLifetimeDistribution& s_a,
                         const EmpiricalLifetimeDistribution& s_b,
                         bool with_reference = true,
                         int terms = kReferenceTerms);

}  // namespace deepclife

#endif  // DEEPCLIFE_KUIPER_HPP_
