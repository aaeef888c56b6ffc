#ifndef DEEPCLIFE_TRAINER_HPP_
#define DEEPCLIFE_TRAINER_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "deepclife/config.hpp"
#include "deepclife/dataset.hpp"
#include "deepclife/divergence.hpp"
#include "deepclife/features.hpp"
#include "deepclife/network.hpp"
#include "deepclife/termination.hpp"

namespace deepclife {

/// How termination probabilities are produced during training. kAuto uses
/// recorded signals when every subject has them, else the learnable model.
enum class TerminationChoice { kAuto, kObserved, kLearnable, kFixed };

std::string to_string(TerminationChoice c);
TerminationChoice parse_termination_choice(const std::string& name);

struct TrainConfig {
  std::size_t clusters = 2;
  std::size_t hidden_layers = 1;
  std::size_t hidden_units = 128;
  std::size_t batch_size = 1024;
  double learning_rate = 1e-2;
  Activation activation = Activation::kRelu;
  bool batch_norm = false;
  double l2 = 1e-2;
  std::size_t epochs = 300;
  std::size_t early_stop_patience = 30;
  std::uint64_t seed = 0;
  std::int64_t tau = 1;
  /// Append event summary statistics over the first tau time units.
  bool event_features = true;

  /// Training optimizes the unclamped Kuiper bound by default.
  DivergenceKind divergence = KuiperUB{false};
  /// Unset means default_pair_sampling(clusters).
  std::optional<PairSampling> pair_sampling;
  bool grad_through_n = true;

  TerminationChoice termination = TerminationChoice::kAuto;
  std::int64_t w_fixed = 10;

  double validation_fraction = 0.2;
  /// Pairs with a cluster whose batch effective size is below this are skipped.
  double min_cluster_size = 1.0;

  DivergenceSpec divergence_spec() const;

  /// Throws ConfigError for unusable values.
  void validate() const;
  /// Messages for values outside the tuned hyperparameter ranges.
  std::vector<std::string> range_warnings() const;

  KeyValueConfig to_key_values() const;
  /// Reads the keys of to_key_values(); missing keys keep their defaults.
  static TrainConfig from_key_values(const KeyValueConfig& kv);
  static const std::vector<std::string>& keys();
};

/// Everything needed to assign new subjects.
struct TrainedModel {
  ModelParams params;
  FeatureScaler scaler;
  TrainConfig config;
  TerminationChoice termination = TerminationChoice::kObserved;
};

/// Pre-extracted inputs of the loss on a fixed set of subjects.
struct LossBatch {
  Eigen::MatrixXd features;  // scaled
  std::vector<std::int64_t> lifetimes;
  std::vector<std::int64_t> inactive;
  std::vector<std::optional<bool>> flags;
  std::int64_t t_max = 0;

  std::size_t size() const { return lifetimes.size(); }
  LossBatch rows(std::span<const std::size_t> indices) const;
};

LossBatch make_loss_batch(const Dataset& data, const FeatureScaler& scaler,
                          const TrainConfig& config, std::int64_t t_max);

struct LossResult {
  /// Pair objective (min over pairs); empty when every pair was skipped.
  std::optional<double> objective;
  /// Minimized quantity: -objective + (l2 / 2) * sum of squared weights.
  double loss = 0.0;
  Eigen::VectorXd gradient;  // flat, same layout as ModelParams::flatten()
  std::size_t skipped_pairs = 0;
  ForwardPass pass;
};

/// Loss and its gradient for one batch. `termination` selects how beta is
/// formed; the learnable model reads its rate from params.log_rate.
LossResult evaluate_loss(const ModelParams& params, const LossBatch& batch,
                         const TrainConfig& config, TerminationChoice termination,
                         Mode mode, std::mt19937_64* rng, bool with_gradient = true);

struct EpochLog {
  std::size_t epoch = 0;
  double train_objective = 0.0;
  double validation_objective = 0.0;
  double best_validation = 0.0;
  double rate = 0.0;
  std::size_t skipped_pairs = 0;
  std::size_t empty_batches = 0;
};

struct TrainResult {
  TrainedModel model;
  std::vector<EpochLog> log;
  std::vector<std::string> warnings;
  std::size_t best_epoch = 0;
};

/// Holds out config.validation_fraction of `data` for early stopping.
TrainResult train(const Dataset& data, const TrainConfig& config);

/// Trains on `training`, early-stopping on `validation` (may be empty, in
/// which case the training objective is monitored).
TrainResult train(const Dataset& training, const Dataset& validation,
                  const TrainConfig& config);

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

struct Assignment {
  std::vector<std::size_t> labels;
  Eigen::MatrixXd alpha;
};

/// Hard labels are argmax_k alpha_k with ties resolved to the lowest index.
Assignment assign(const TrainedModel& model, const Dataset& data);
std::vector<std::size_t> hard_labels(const Eigen::MatrixXd& alpha);

/// Text checkpoint headed by the magic line `DEEPCLIFE1`; reals are stored
/// as hexadecimal floats so a reload is exact.
void save_checkpoint(std::ostream& out, const TrainedModel& model);
void save_checkpoint(const std::string& path, const TrainedModel& model);
TrainedModel load_checkpoint(std::istream& in);
TrainedModel load_checkpoint(const std::string& path);

inline constexpr const char* kCheckpointMagic = "DEEPCLIFE1";

}  // namespace deepclife

#endif  // DEEPCLIFE_TRAINER_HPP_
