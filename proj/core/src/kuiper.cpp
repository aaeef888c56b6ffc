#include "deepclife/kuiper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

// v(r, l) = (4 r^2 l^2 - 1) exp(-2 r^2 l^2)
double series_term(double r, double lambda) {
  const double a = r * r * lambda * lambda;
  return (4.0 * a - 1.0) * std::exp(-2.0 * a);
}

// w(r, l) = -r exp(-2 r^2 l^2), an antiderivative of v in r.
double antiderivative(double r, double lambda) {
  return -r * std::exp(-2.0 * r * r * lambda * lambda);
}

double series_term_dlambda(double r, double lambda) {
  const double a = r * r * lambda * lambda;
  return 4.0 * r * r * lambda * (3.0 - 4.0 * a) * std::exp(-2.0 * a);
}

double antiderivative_dlambda(double r, double lambda) {
  return 4.0 * r * r * r * lambda * std::exp(-2.0 * r * r * lambda * lambda);
}

struct Mode {
  double lambda;
  double r_lo;
  double r_up;
};

// Integer neighbours of the series mode 1/(sqrt(2) lambda). When the mode is
// itself an integer lambda is nudged upward by one ulp at a time.
Mode locate_mode(double lambda) {
  while (true) {
    const double x = 1.0 / (std::sqrt(2.0) * lambda);
    const double lo = std::floor(x);
    const double up = std::ceil(x);
    if (lo != up) return {lambda, lo, up};
    lambda = std::nextafter(lambda, std::numeric_limits<double>::infinity());
  }
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw NumericalError("lambda must be a finite nonnegative number");
  }
}

}  // namespace

KuiperStatistic kuiper_statistic(const EmpiricalLifetimeDistribution& s_a,
                                 const EmpiricalLifetimeDistribution& s_b) {
  if (s_a.size() != s_b.size()) {
    throw DataError("Kuiper statistic needs distributions of equal length");
  }
  KuiperStatistic out;
  double best_plus = 0.0;
  double best_minus = 0.0;
  for (std::size_t t = 0; t < s_a.size(); ++t) {
    const double diff = s_a.values[t] - s_b.values[t];
    if (diff > best_plus) {
      best_plus = diff;
      out.argmax_plus = t;
    }
    if (-diff > best_minus) {
      best_minus = -diff;
      out.argmax_minus = t;
    }
  }
  out.d_plus = best_plus;
  out.d_minus = best_minus;
  out.v_stat = best_plus + best_minus;
  return out;
}

double effective_sample_size(double n_a, double n_b) {
  if (!(n_a > 0.0) || !(n_b > 0.0)) {
    throw NumericalError("sample sizes must be positive");
  }
  return n_a * n_b / (n_a + n_b);
}

double lambda_of(double v_stat, double n_a, double n_b) {
  const double root = std::sqrt(effective_sample_size(n_a, n_b));
  return (root + 0.155 + 0.24 / root) * v_stat;
}

LambdaGradient lambda_gradient(double v_stat, double n_a, double n_b) {
  const double m = effective_sample_size(n_a, n_b);
  const double root = std::sqrt(m);
  const double dl_dm = v_stat * (0.5 / root - 0.12 / (m * root));
  const double sum = n_a + n_b;
  return {root + 0.155 + 0.24 / root,
          dl_dm * n_b * n_b / (sum * sum),
          dl_dm * n_a * n_a / (sum * sum)};
}

double kd_reference(double lambda, int terms) {
  check_lambda(lambda);
  if (lambda < kReferenceLambdaFloor) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= terms; ++j) {
    const double a = static_cast<double>(j) * j * lambda * lambda;
    const double decay = std::exp(-2.0 * a);
    // decay is decreasing in j; once it underflows every later term is 0.
    if (decay == 0.0) break;
    sum += (4.0 * a - 1.0) * decay;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double kd_upper_bound(double lambda) {
  check_lambda(lambda);
  if (lambda == 0.0) return 1.0;
  const auto [l, r_lo, r_up] = locate_mode(lambda);
  double bound = series_term(r_up, l) - antiderivative(r_up, l);
  if (r_lo >= 1.0) {
    bound += antiderivative(r_lo, l) - antiderivative(1.0, l) + series_term(r_lo, l);
  }
  return std::min(1.0, 2.0 * bound);
}

double kd_lower_bound(double lambda) {
  check_lambda(lambda);
  if (lambda == 0.0) return 1.0;
  const auto [l, r_lo, r_up] = locate_mode(lambda);
  double bound = series_term(r_up, l) + antiderivative(r_up + 1.0, l);
  if (r_lo >= 1.0) {
    bound += antiderivative(r_lo - 1.0, l) + series_term(r_lo, l);
  }
  return std::max(0.0, 2.0 * bound);
}

LogBound log_kd_upper_grad(double lambda, bool clamp) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw NumericalError("log upper bound needs a positive finite lambda");
  }
  const auto [l, r_lo, r_up] = locate_mode(lambda);
  if (r_lo < 1.0) {
    // r_up = 1: 2 (v(1) - w(1)) = 8 l^2 exp(-2 l^2), kept in log space so
    // large lambda does not underflow.
    const double log_value = std::log(8.0 * l * l) - 2.0 * l * l;
    if (clamp && log_value >= 0.0) return {0.0, 0.0};
    return {log_value, 2.0 / l - 4.0 * l};
  }
  const double value =
      2.0 * (antiderivative(r_lo, l) - antiderivative(1.0, l) + series_term(r_lo, l) +
             series_term(r_up, l) - antiderivative(r_up, l));
  if (clamp && value >= 1.0) return {0.0, 0.0};
  const double slope =
      2.0 * (antiderivative_dlambda(r_lo, l) - antiderivative_dlambda(1.0, l) +
             series_term_dlambda(r_lo, l) + series_term_dlambda(r_up, l) -
             antiderivative_dlambda(r_up, l));
  return {std::log(value), slope / value};
}

double log_kd_upper_unclamped_at_zero() {
  // Each bracket term tends to a multiple of e^-1 and -w(1) tends to 1.
  return std::log(2.0 * (1.0 + std::exp(-1.0)));
}

KuiperResult kuiper_test(const EmpiricalLifetimeDistribution& s_a,
                         const EmpiricalLifetimeDistribution& s_b,
                         bool with_reference, int terms) {
  const auto stat = kuiper_statistic(s_a, s_b);
  KuiperResult r;
  r.d_plus = stat.d_plus;
  r.d_minus = stat.d_minus;
  r.v_stat = stat.v_stat;
  r.effective_m = effective_sample_size(s_a.effective_n, s_b.effective_n);
  r.lambda = lambda_of(stat.v_stat, s_a.effective_n, s_b.effective_n);
  r.p_upper = kd_upper_bound(r.lambda);
  r.p_lower = kd_lower_bound(r.lambda);
  if (with_reference) r.p_reference = kd_reference(r.lambda, terms);
  return r;
}

}  // namespace deepclife
