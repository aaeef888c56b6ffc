#include <gtest/gtest.h>

#include <cmath>

#include "deepclife/error.hpp"
#include "deepclife/termination.hpp"
#include "oracles.hpp"

using namespace deepclife;

namespace {

SubjectRecord bare() { return oracle::subject("u", 3); }

LearnableExponential with_rate(double xi) { return LearnableExponential{std::log(xi)}; }

}  // namespace

TEST(Termination, LearnableAtZeroInactivityIsZero) {
  EXPECT_DOUBLE_EQ(termination_probability(bare(), 0, with_rate(0.5)), 0.0);
}

TEST(Termination, FixedTimeoutIsStrictlyGreaterThanWindow) {
  EXPECT_EQ(termination_probability(bare(), 10, FixedTimeout{10}), 0.0);
  EXPECT_EQ(termination_probability(bare(), 11, FixedTimeout{10}), 1.0);
}

TEST(Termination, LearnableClosedForm) {
  EXPECT_NEAR(termination_probability(bare(), 2, with_rate(0.5)), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(termination_probability(bare(), 2, with_rate(0.5)), 0.63212, 1e-5);
}

TEST(Termination, ObservedSignals) {
  auto s = oracle::subject("u", 3, true);
  EXPECT_EQ(termination_probability(s, 4, ObservedSignals{}), 1.0);
  s = oracle::subject("u", 3, false);
  EXPECT_EQ(termination_probability(s, 4, ObservedSignals{}), 0.0);
}

TEST(Termination, ObservedSignalsMissingFlagsFails) {
  try {
    termination_probability(bare(), 4, ObservedSignals{});
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "termination signals unavailable");
  }
}

TEST(Termination, RateIsPositiveForAnyLogRate) {
  for (double lr : {-700.0, -5.0, 0.0, 5.0}) {
    EXPECT_GT(LearnableExponential{lr}.rate(), 0.0);
  }
}

TEST(Termination, LogRateGradientMatchesFiniteDifference) {
  Dataset d({oracle::subject("a", 2), oracle::subject("b", 5), oracle::subject("c", 9)}, 12);
  const LearnableExponential model{-1.3};
  const auto grad = termination_log_rate_gradient(d, model);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto f = [&](double lr) {
      return termination_probability(d, i, LearnableExponential{lr});
    };
    EXPECT_LT(oracle::relative_error(grad[i], oracle::central_difference(f, model.log_rate, 1e-6)),
              1e-7);
  }
  const auto fixed = termination_log_rate_gradient(d, FixedTimeout{3});
  for (double g : fixed) EXPECT_EQ(g, 0.0);
}

TEST(Termination, InitialLogRateHalvesBetaAtMedianInactivity) {
  // chi = 10, 7, 3 -> median 7.
  Dataset d({oracle::subject("a", 2), oracle::subject("b", 5), oracle::subject("c", 9)}, 12);
  const LearnableExponential model{initial_log_rate(d)};
  EXPECT_NEAR(termination_probability(oracle::subject("m", 0), 7, model), 0.5, 1e-12);
}

TEST(Termination, InitialLogRateFallsBackWithoutInactivity) {
  Dataset d({oracle::subject("a", 4), oracle::subject("b", 4)}, 4);
  const LearnableExponential model{initial_log_rate(d)};
  EXPECT_NEAR(termination_probability(oracle::subject("m", 0), 1, model), 0.5, 1e-12);
}
