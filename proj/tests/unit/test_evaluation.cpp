#include <gtest/gtest.h>

#include <sstream>

#include "deepclife/error.hpp"
#include "deepclife/evaluation.hpp"
#include "deepclife/metrics.hpp"
#include "oracles.hpp"

using namespace deepclife;

namespace {

Dataset flagged() {
  return Dataset({oracle::subject("a", 2, true), oracle::subject("b", 5, false),
                  oracle::subject("c", 3, true), oracle::subject("d", 8, true),
                  oracle::subject("e", 9, true), oracle::subject("f", 7, false)},
                 10);
}

}  // namespace

TEST(Evaluation, EventsFromFlagsOrTimeout) {
  const auto d = flagged();
  EXPECT_EQ(evaluation_events(d, {}), (std::vector<bool>{true, false, true, true, true, false}));
  Dataset bare({oracle::subject("a", 2), oracle::subject("b", 9)}, 15);
  EXPECT_EQ(evaluation_events(bare, EvalOptions{10}), (std::vector<bool>{true, false}));
  EXPECT_EQ(evaluation_events(bare, EvalOptions{12}), (std::vector<bool>{true, false}));
  EXPECT_EQ(evaluation_events(bare, EvalOptions{13}), (std::vector<bool>{false, false}));
}

TEST(Evaluation, EmptyClusterCurveIsAllOnes) {
  const auto d = flagged();
  const std::vector<std::size_t> labels(6, 0);
  const auto curves = cluster_curves(d, labels, 2, evaluation_events(d, {}));
  EXPECT_TRUE(curves[1].degenerate);
  for (double v : curves[1].values) EXPECT_EQ(v, 1.0);
}

TEST(Evaluation, ReportUsesClusterCurves) {
  const auto d = flagged();
  const std::vector<std::size_t> labels{0, 1, 0, 1, 1, 0};
  const std::vector<std::size_t> truth{0, 0, 0, 1, 1, 1};
  std::vector<EmpiricalLifetimeDistribution> curves;
  const auto r = evaluate_clustering(d, labels, 2, truth, {}, &curves);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(r.cluster_sizes, (std::vector<std::size_t>{3, 3}));
  ASSERT_TRUE(r.ari.has_value());
  EXPECT_EQ(*r.ari, adjusted_rand(labels, truth));

  const auto events = evaluation_events(d, {});
  std::vector<bool> censored;
  for (bool e : events) censored.push_back(!e);
  const std::vector<std::int64_t> h(d.observed_lifetimes().begin(), d.observed_lifetimes().end());
  std::vector<double> risk;
  for (auto l : labels) risk.push_back(-restricted_mean(curves[l]));
  EXPECT_EQ(r.c_index, oracle::c_index(h, censored, risk));
  EXPECT_NEAR(r.logrank, oracle::logrank(h, events, labels, 2), 1e-12);
  EXPECT_NEAR(r.ibs,
              oracle::integrated_brier(h, censored, {curves[0].values, curves[1].values}, labels),
              1e-12);
}

TEST(Evaluation, SingleNonemptyClusterHasZeroLogrank) {
  const auto d = flagged();
  const auto r = evaluate_clustering(d, std::vector<std::size_t>(6, 1), 3, std::nullopt);
  EXPECT_EQ(r.logrank, 0.0);
  EXPECT_EQ(r.c_index, 0.5);
  EXPECT_FALSE(r.ari.has_value());
}

TEST(Evaluation, LogrankSkipsEmptyClusters) {
  const auto d = flagged();
  const std::vector<std::size_t> labels{0, 2, 0, 2, 2, 0};
  const auto r = evaluate_clustering(d, labels, 3, std::nullopt);
  const std::vector<std::size_t> compact{0, 1, 0, 1, 1, 0};
  const std::vector<std::int64_t> h(d.observed_lifetimes().begin(), d.observed_lifetimes().end());
  EXPECT_EQ(r.logrank, logrank(h, evaluation_events(d, {}), compact, 2));
}

TEST(Evaluation, RejectsBadLabels) {
  const auto d = flagged();
  EXPECT_THROW(evaluate_clustering(d, std::vector<std::size_t>(6, 2), 2, std::nullopt), DataError);
  EXPECT_THROW(evaluate_clustering(d, std::vector<std::size_t>(5, 0), 2, std::nullopt), DataError);
}

TEST(Evaluation, ReportAndCurveFormats) {
  const auto d = flagged();
  const std::vector<std::size_t> labels{0, 1, 0, 1, 1, 0};
  std::vector<EmpiricalLifetimeDistribution> curves;
  const auto r = evaluate_clustering(d, labels, 2, labels, {}, &curves);
  std::ostringstream report, csv;
  write_report(report, r);
  EXPECT_NE(report.str().find("c_index = "), std::string::npos);
  EXPECT_NE(report.str().find("ari = 1\n"), std::string::npos);
  EXPECT_NE(report.str().find("cluster_size_1 = 3\n"), std::string::npos);
  write_curves_csv(csv, curves);
  const std::string text = csv.str();
  EXPECT_EQ(text.substr(0, 10), "t,S_0,S_1\n");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + d.t_max() + 1);
}
