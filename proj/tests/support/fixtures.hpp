#ifndef DEEPCLIFE_TESTS_FIXTURES_HPP_
#define DEEPCLIFE_TESTS_FIXTURES_HPP_

#include <random>
#include <string>
#include <vector>

#include "deepclife/dataset.hpp"
#include "deepclife/trainer.hpp"
#include "oracles.hpp"

namespace fixture {

// Subjects with several events each, staggered joining and no termination
// flags, so training uses the learnable exponential model.
inline deepclife::Dataset activity_dataset(std::mt19937_64& rng, std::size_t n,
                                           std::size_t covariates, std::int64_t t_m) {
  std::uniform_int_distribution<std::int64_t> join(0, t_m / 4);
  std::uniform_int_distribution<int> events(1, 5);
  std::normal_distribution<double> normal;
  std::vector<deepclife::SubjectRecord> subjects;
  for (std::size_t i = 0; i < n; ++i) {
    deepclife::SubjectRecord s;
    s.id = "u" + std::to_string(i);
    s.joining_time = join(rng);
    const std::int64_t room = t_m - s.joining_time;
    const std::int64_t budget = std::uniform_int_distribution<std::int64_t>(0, room)(rng);
    std::int64_t used = 0;
    for (int e = events(rng); e > 0 && used < budget; --e) {
      const auto gap = std::uniform_int_distribution<std::int64_t>(0, budget - used)(rng);
      s.inter_event_times.push_back(gap);
      used += gap;
    }
    for (std::size_t c = 0; c < covariates; ++c) s.covariates.push_back(normal(rng) + (i % 2) * 1.5);
    subjects.push_back(std::move(s));
  }
  return deepclife::Dataset(std::move(subjects), t_m);
}

struct GradientCheck {
  double worst_relative_error = 0.0;
  Eigen::Index worst_index = -1;
  Eigen::Index checked = 0;
  double analytic_log_rate = 0.0;
  double numeric_log_rate = 0.0;
};

// Central differences of evaluate_loss over every flat parameter.
inline GradientCheck check_loss_gradient(const deepclife::ModelParams& params,
                                         const deepclife::LossBatch& batch,
                                         const deepclife::TrainConfig& config,
                                         deepclife::TerminationChoice termination, double h,
                                         double floor) {
  using namespace deepclife;
  const auto loss_at = [&](const Eigen::VectorXd& flat) {
    auto p = params;
    p.assign(flat);
    return evaluate_loss(p, batch, config, termination, Mode::kTraining, nullptr, false).loss;
  };
  const auto analytic =
      evaluate_loss(params, batch, config, termination, Mode::kTraining, nullptr).gradient;
  const Eigen::VectorXd flat = params.flatten();
  GradientCheck out;
  for (Eigen::Index j = 0; j < flat.size(); ++j) {
    Eigen::VectorXd up = flat, down = flat;
    up(j) += h;
    down(j) -= h;
    const double fd = (loss_at(up) - loss_at(down)) / (2.0 * h);
    const double err = oracle::relative_error(analytic(j), fd, floor);
    if (err > out.worst_relative_error) {
      out.worst_relative_error = err;
      out.worst_index = j;
    }
    if (j == flat.size() - 1) {
      out.analytic_log_rate = analytic(j);
      out.numeric_log_rate = fd;
    }
    ++out.checked;
  }
  return out;
}

// The seeded 20-subject, two-cluster, one-hidden-layer instance.
struct GradientInstance {
  deepclife::ModelParams params;
  deepclife::LossBatch batch;
  deepclife::TrainConfig config;
};

inline GradientInstance gradient_instance(std::uint64_t seed, bool batch_norm = false) {
  using namespace deepclife;
  std::mt19937_64 rng(seed);
  const auto data = activity_dataset(rng, 20, 3, 40);
  GradientInstance x;
  x.config.clusters = 2;
  x.config.hidden_layers = 1;
  x.config.hidden_units = 8;
  x.config.activation = Activation::kTanh;
  x.config.batch_norm = batch_norm;
  x.config.tau = 5;
  x.config.min_cluster_size = 0.0;
  const auto features = extract_feature_matrix(data, x.config.tau);
  const auto scaler = FeatureScaler::fit(features);
  x.batch = make_loss_batch(data, scaler, x.config, data.t_max());
  x.params = initialize_params(static_cast<std::size_t>(features.cols()), 2, 1, 8,
                               x.config.activation, batch_norm, initial_log_rate(data), rng);
  // Larger output weights separate the two soft clusters, moving lambda well
  // away from the origin.
  x.params.layers.back().weight *= 6.0;
  return x;
}

}  // namespace fixture

#endif  // DEEPCLIFE_TESTS_FIXTURES_HPP_
