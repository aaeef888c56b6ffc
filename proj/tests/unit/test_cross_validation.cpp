#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "deepclife/cross_validation.hpp"
#include "deepclife/error.hpp"
#include "deepclife/synth.hpp"

using namespace deepclife;

TEST(Folds, PartitionIsBalancedAndSeeded) {
  const auto folds = make_folds(103, 5, 7);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_TRUE(f.size() == 20 || f.size() == 21);
    EXPECT_TRUE(std::is_sorted(f.begin(), f.end()));
    seen.insert(f.begin(), f.end());
  }
  EXPECT_EQ(seen.size(), 103u);
  EXPECT_EQ(*seen.rbegin(), 102u);
  EXPECT_EQ(make_folds(103, 5, 7), folds);
  EXPECT_NE(make_folds(103, 5, 8), folds);
  EXPECT_THROW(make_folds(3, 5, 1), ConfigError);
  EXPECT_THROW(make_folds(10, 1, 1), ConfigError);
}

TEST(MeanSe, SampleStandardError) {
  const std::vector<double> v{1, 2, 3, 4};
  const auto m = mean_se(v);
  EXPECT_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  const std::vector<double> one{7};
  EXPECT_EQ(mean_se(one).se, 0.0);
}

TEST(CrossValidate, SmallRunIsDeterministicAndComplete) {
  SynthSpec spec;
  spec.clusters = {SynthCluster::kC1, SynthCluster::kC3};
  spec.n_per_cluster = 100;
  spec.seed = 4;
  const auto synth = generate(spec);
  TrainConfig config;
  config.hidden_units = 8;
  config.batch_size = 64;
  config.epochs = 4;
  config.event_features = false;
  CvOptions options;
  options.folds = 3;
  options.random_control = true;
  options.l2_grid = {1e-2, 0.0};
  const std::span<const std::size_t> truth(synth.labels);
  const auto a = cross_validate(synth.data, config, options, truth);
  const auto b = cross_validate(synth.data, config, options, truth);
  ASSERT_EQ(a.folds.size(), 3u);
  for (const auto& f : a.folds) {
    EXPECT_TRUE(f.control.has_value());
    EXPECT_TRUE(f.l2 == 1e-2 || f.l2 == 0.0);
    EXPECT_GE(f.best_epoch, 1u);
    EXPECT_LE(f.best_epoch, f.epochs_run);
  }
  ASSERT_TRUE(a.ari.has_value());
  ASSERT_TRUE(a.control_c_index.has_value());
  std::ostringstream ra, rb;
  write_cv_report(ra, a);
  write_cv_report(rb, b);
  EXPECT_EQ(ra.str(), rb.str());
  EXPECT_NE(ra.str().find("folds = 3\n"), std::string::npos);
  EXPECT_NE(ra.str().find("fold2.control.c_index = "), std::string::npos);
  EXPECT_NE(ra.str().find("table = ARI "), std::string::npos);
}

TEST(CrossValidate, TrainingSubsample) {
  SynthSpec spec;
  spec.clusters = {SynthCluster::kC2, SynthCluster::kC3};
  spec.n_per_cluster = 60;
  const auto synth = generate(spec);
  TrainConfig config;
  config.hidden_units = 4;
  config.epochs = 2;
  config.event_features = false;
  CvOptions options;
  options.folds = 2;
  options.n_train = 30;
  const auto r = cross_validate(synth.data, config, options);
  EXPECT_EQ(r.folds.size(), 2u);
  EXPECT_FALSE(r.ari.has_value());
}
