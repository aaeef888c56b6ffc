#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "deepclife/error.hpp"
#include "deepclife/kuiper.hpp"
#include "oracles.hpp"

using namespace deepclife;

namespace {

EmpiricalLifetimeDistribution curve(std::vector<double> v, double n = 100.0) {
  EmpiricalLifetimeDistribution d;
  d.values = std::move(v);
  d.effective_n = n;
  return d;
}

// Evaluation points strictly inside (0.5, 5].
std::vector<double> lambda_grid(int count) {
  std::vector<double> grid;
  for (int i = 1; i <= count; ++i) grid.push_back(0.5 + 4.5 * i / count);
  return grid;
}

}  // namespace

TEST(KuiperStatistic, IdenticalCurves) {
  const auto a = curve({1, 0.7, 0.2});
  const auto s = kuiper_statistic(a, a);
  EXPECT_EQ(s.d_plus, 0.0);
  EXPECT_EQ(s.d_minus, 0.0);
  EXPECT_EQ(s.v_stat, 0.0);
}

TEST(KuiperStatistic, OneSidedStep) {
  const auto s = kuiper_statistic(curve({1, 1, 0}), curve({1, 0, 0}));
  EXPECT_EQ(s.d_plus, 1.0);
  EXPECT_EQ(s.d_minus, 0.0);
  EXPECT_EQ(s.v_stat, 1.0);
  EXPECT_EQ(s.argmax_plus, 1u);
}

TEST(KuiperStatistic, CrossingCurves) {
  const auto s = kuiper_statistic(curve({1, 0.8, 0.2, 0}), curve({1, 0.5, 0.5, 0}));
  EXPECT_NEAR(s.d_plus, 0.3, 1e-15);
  EXPECT_NEAR(s.d_minus, 0.3, 1e-15);
  EXPECT_NEAR(s.v_stat, 0.6, 1e-15);
}

TEST(KuiperStatistic, DominatedDirectionIsClampedAtZero) {
  const auto s = kuiper_statistic(curve({0.9, 0.8}), curve({0.5, 0.4}));
  EXPECT_EQ(s.d_minus, 0.0);
  EXPECT_FALSE(s.argmax_minus.has_value());
  EXPECT_NEAR(s.v_stat, 0.4, 1e-15);
}

TEST(KuiperStatistic, LengthMismatchFails) {
  EXPECT_THROW(kuiper_statistic(curve({1, 0}), curve({1})), DataError);
}

TEST(KuiperStatistic, SwapExchangesSides) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(10), b(10);
    for (auto& v : a) v = unit(rng);
    for (auto& v : b) v = unit(rng);
    std::sort(a.rbegin(), a.rend());
    std::sort(b.rbegin(), b.rend());
    const auto ab = kuiper_statistic(curve(a), curve(b));
    const auto ba = kuiper_statistic(curve(b), curve(a));
    EXPECT_EQ(ab.d_plus, ba.d_minus);
    EXPECT_EQ(ab.d_minus, ba.d_plus);
    EXPECT_EQ(ab.v_stat, ba.v_stat);
    EXPECT_GE(ab.d_plus, 0.0);
    EXPECT_LE(ab.v_stat, 2.0);
  }
}

TEST(Lambda, Examples) {
  EXPECT_EQ(lambda_of(0.0, 10, 20), 0.0);
  EXPECT_DOUBLE_EQ(effective_sample_size(100, 100), 50.0);
  const double m50 = std::sqrt(50.0);
  EXPECT_NEAR(lambda_of(0.2, 100, 100), (m50 + 0.155 + 0.24 / m50) * 0.2, 1e-15);
  EXPECT_NEAR(lambda_of(0.2, 100, 100), 1.452002, 1e-6);
  EXPECT_NEAR(lambda_of(0.1, 1000, 1000), 2.25264, 1e-5);
}

TEST(Lambda, NonpositiveSizeFails) {
  EXPECT_THROW(lambda_of(0.2, 0.0, 10), NumericalError);
  EXPECT_THROW(lambda_of(0.2, 10, -1), NumericalError);
}

TEST(Lambda, GradientMatchesFiniteDifference) {
  const double v = 0.37, na = 12.5, nb = 40.0;
  const auto g = lambda_gradient(v, na, nb);
  const double h = 1e-6;
  EXPECT_LT(oracle::relative_error(g.d_v, oracle::central_difference(
                                              [&](double x) { return lambda_of(x, na, nb); }, v, h)),
            1e-8);
  EXPECT_LT(oracle::relative_error(g.d_na, oracle::central_difference(
                                               [&](double x) { return lambda_of(v, x, nb); }, na, h)),
            1e-6);
  EXPECT_LT(oracle::relative_error(g.d_nb, oracle::central_difference(
                                               [&](double x) { return lambda_of(v, na, x); }, nb, h)),
            1e-6);
}

TEST(Reference, Examples) {
  EXPECT_EQ(kd_reference(0.0), 1.0);
  EXPECT_LT(kd_reference(5.0), 1e-15);
  EXPECT_NEAR(kd_reference(5.0), 2.0 * 99.0 * std::exp(-50.0), 1e-30);
  const double p = kd_reference(1.0);
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1.0);
  EXPECT_LE(kd_lower_bound(1.0), p);
  EXPECT_LE(p, kd_upper_bound(1.0));
}

TEST(Reference, BelowFloorIsOne) {
  EXPECT_EQ(kd_reference(0.39), 1.0);
  EXPECT_EQ(kd_reference(kReferenceLambdaFloor * 0.999), 1.0);
}

TEST(UpperBound, Examples) {
  EXPECT_EQ(kd_upper_bound(0.0), 1.0);
  EXPECT_NEAR(kd_upper_bound(3.0), 72.0 * std::exp(-18.0), 1e-18);
  EXPECT_NEAR(kd_upper_bound(3.0), 1.09656e-6, 1e-11);
}

TEST(LowerBound, Examples) {
  EXPECT_EQ(kd_lower_bound(0.0), 1.0);
  const double expected = 2.0 * (35.0 * std::exp(-18.0) - 2.0 * std::exp(-72.0));
  EXPECT_NEAR(kd_lower_bound(3.0), expected, 1e-20);
  EXPECT_LE(kd_lower_bound(3.0), kd_upper_bound(3.0));
}

TEST(Bounds, SandwichOnCoarseGrid) {
  for (double l = 0.6; l <= 3.0 + 1e-9; l += 0.2) {
    const double ref = kd_reference(l);
    EXPECT_LE(kd_lower_bound(l), ref + 1e-12) << l;
    EXPECT_LE(ref, kd_upper_bound(l) + 1e-12) << l;
  }
}

TEST(Bounds, SandwichOnThousandPoints) {
  int violations = 0;
  for (double l : lambda_grid(1000)) {
    const double ref = kd_reference(l);
    if (kd_lower_bound(l) > ref + 1e-12 || ref > kd_upper_bound(l) + 1e-12) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(Bounds, RangeIsUnitInterval) {
  for (double l = 0.0; l <= 8.0; l += 0.01) {
    for (double p : {kd_lower_bound(l), kd_reference(l), kd_upper_bound(l)}) {
      ASSERT_GE(p, 0.0) << l;
      ASSERT_LE(p, 1.0) << l;
    }
  }
}

TEST(Bounds, UpperNonincreasingPastMode) {
  double previous = kd_upper_bound(1.0 / std::sqrt(2.0));
  for (double l = 1.0 / std::sqrt(2.0); l <= 6.0; l += 1e-3) {
    const double p = kd_upper_bound(l);
    ASSERT_LE(p, previous + 1e-15) << l;
    previous = p;
  }
}

TEST(Bounds, JumpsAtBreakpointsStayWithinGap) {
  for (int r = 1; r <= 6; ++r) {
    const double at = 1.0 / (std::sqrt(2.0) * r);
    const double left = at * (1.0 - 1e-9), right = at * (1.0 + 1e-9);
    const double jump = std::abs(kd_upper_bound(left) - kd_upper_bound(right));
    const double gap = std::max(kd_upper_bound(left) - kd_lower_bound(left),
                                kd_upper_bound(right) - kd_lower_bound(right));
    EXPECT_LE(jump, gap) << "r=" << r;
  }
}

TEST(Bounds, IntegralBreakpointIsHandled) {
  // 1/(sqrt(2) lambda) == 1 exactly in real arithmetic.
  const double l = 1.0 / std::sqrt(2.0);
  const double p = kd_upper_bound(l);
  EXPECT_TRUE(std::isfinite(p));
  EXPECT_GE(p, kd_reference(l) - 1e-12);
}

TEST(LogUpperGrad, ClampRegionHasZeroGradient) {
  const auto b = log_kd_upper_grad(0.8);
  EXPECT_EQ(kd_upper_bound(0.8), 1.0);
  EXPECT_EQ(b.value, 0.0);
  EXPECT_EQ(b.d_dlambda, 0.0);
}

TEST(LogUpperGrad, FiniteDifferenceAtThree) {
  const auto b = log_kd_upper_grad(3.0);
  EXPECT_NEAR(b.value, std::log(kd_upper_bound(3.0)), 1e-12);
  const double fd = oracle::central_difference(
      [](double l) { return std::log(kd_upper_bound(l)); }, 3.0, 1e-6);
  EXPECT_LT(oracle::relative_error(b.d_dlambda, fd), 1e-5);
}

TEST(LogUpperGrad, DecreasingForLargeLambda) {
  const auto b = log_kd_upper_grad(10.0);
  EXPECT_LT(b.d_dlambda, 0.0);
  // Only the r = 1 terms survive: 2 (4 l^2 - 1 + 1) e^{-2 l^2}.
  EXPECT_NEAR(b.value, std::log(8.0 * 100.0) - 2.0 * 100.0, 1e-9);
}

TEST(LogUpperGrad, NonpositiveLambdaFails) {
  EXPECT_THROW(log_kd_upper_grad(0.0), NumericalError);
  EXPECT_THROW(log_kd_upper_grad(-1.0), NumericalError);
}

TEST(LogUpperGrad, UnclampedMatchesFiniteDifferenceWithinBranches) {
  for (double l : {0.05, 0.21, 0.33, 0.5, 0.62, 0.9, 1.4, 2.2, 4.0}) {
    const auto b = log_kd_upper_grad(l, false);
    const double fd = oracle::central_difference(
        [](double x) { return log_kd_upper_grad(x, false).value; }, l, 1e-7);
    EXPECT_LT(oracle::relative_error(b.d_dlambda, fd, 1e-6), 1e-5) << l;
    if (kd_upper_bound(l) < 1.0) {
      EXPECT_NEAR(b.value, std::log(kd_upper_bound(l)), 1e-12);
    }
  }
}

TEST(LogUpperGrad, UnclampedLimitAtZero) {
  EXPECT_NEAR(log_kd_upper_unclamped_at_zero(), std::log(2.0 * (1.0 + std::exp(-1.0))), 1e-15);
  EXPECT_NEAR(log_kd_upper_grad(1e-6, false).value, log_kd_upper_unclamped_at_zero(), 1e-6);
}

TEST(KuiperTest, IdenticalSamplesGiveUnitUpperBound) {
  const auto a = curve({1, 0.6, 0.3, 0.1}, 40);
  const auto r = kuiper_test(a, a);
  EXPECT_EQ(r.p_upper, 1.0);
  EXPECT_EQ(r.lambda, 0.0);
  ASSERT_TRUE(r.p_reference.has_value());
  EXPECT_EQ(*r.p_reference, 1.0);
}

TEST(KuiperTest, ReportIsConsistent) {
  const auto r = kuiper_test(curve({1, 0.8, 0.2, 0}, 300), curve({1, 0.5, 0.5, 0}, 200));
  EXPECT_DOUBLE_EQ(r.effective_m, 120.0);
  EXPECT_DOUBLE_EQ(r.lambda, lambda_of(r.v_stat, 300, 200));
  ASSERT_TRUE(r.p_reference.has_value());
  EXPECT_LE(r.p_lower, *r.p_reference);
  EXPECT_LE(*r.p_reference, r.p_upper);
  EXPECT_FALSE(kuiper_test(curve({1, 0}, 3), curve({1, 0}, 3), false).p_reference.has_value());
}
