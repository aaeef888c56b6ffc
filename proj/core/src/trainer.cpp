#include "deepclife/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "deepclife/error.hpp"
#include "deepclife/kaplan_meier.hpp"

namespace deepclife {

namespace {

std::string real_text(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sampling_text(const std::optional<PairSampling>& s) {
  if (!s) return "auto";
  if (std::holds_alternative<AllPairs>(*s)) return "all";
  return "sample:" + std::to_string(std::get<SampleWithoutReplacement>(*s).count);
}

std::optional<PairSampling> parse_sampling(const std::string& text) {
  if (text == "auto") return std::nullopt;
  if (text == "all") return AllPairs{};
  if (text.rfind("sample:", 0) == 0) {
    const auto n = parse_integer(text.substr(7), "pair_sampling");
    if (n <= 0) throw ConfigError("pair_sampling sample count must be positive");
    return SampleWithoutReplacement{static_cast<std::size_t>(n)};
  }
  throw ConfigError("pair_sampling must be auto, all or sample:<count>");
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

TerminationChoice resolve_termination(TerminationChoice choice, const Dataset& data) {
  if (choice != TerminationChoice::kAuto) return choice;
  return data.has_termination_signals() ? TerminationChoice::kObserved
                                        : TerminationChoice::kLearnable;
}

}  // namespace

std::string to_string(TerminationChoice c) {
  switch (c) {
    case TerminationChoice::kAuto: return "auto";
    case TerminationChoice::kObserved: return "observed";
    case TerminationChoice::kLearnable: return "learnable";
    case TerminationChoice::kFixed: return "fixed";
  }
  return "auto";
}

TerminationChoice parse_termination_choice(const std::string& name) {
  if (name == "auto") return TerminationChoice::kAuto;
  if (name == "observed") return TerminationChoice::kObserved;
  if (name == "learnable") return TerminationChoice::kLearnable;
  if (name == "fixed") return TerminationChoice::kFixed;
  throw ConfigError("termination must be auto, observed, learnable or fixed");
}

DivergenceSpec TrainConfig::divergence_spec() const {
  DivergenceSpec spec;
  spec.kind = divergence;
  spec.sampling = pair_sampling.value_or(default_pair_sampling(clusters));
  spec.grad_through_n = grad_through_n;
  return spec;
}

void TrainConfig::validate() const {
  if (clusters < 2) throw ConfigError("K must be at least 2");
  if (hidden_layers > 0 && hidden_units == 0) throw ConfigError("hidden_units must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be nonnegative");
  if (!(l2 >= 0.0)) throw ConfigError("l2 must be nonnegative");
  if (tau <= 0) throw ConfigError("tau must be positive");
  if (w_fixed < 0) throw ConfigError("w_fixed must be nonnegative");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0)) {
    throw ConfigError("validation_fraction must be in [0, 1)");
  }
  if (pair_sampling) {
    if (const auto* s = std::get_if<SampleWithoutReplacement>(&*pair_sampling)) {
      if (s->count == 0 || s->count > pair_count(clusters)) {
        throw ConfigError("pair sample count must be in [1, K(K-1)/2]");
      }
    }
  }
  if (const auto* m = std::get_if<MMD>(&divergence); m && m->bandwidth < 0.0) {
    throw ConfigError("mmd_bandwidth must be nonnegative (0 selects the median gap)");
  }
}

std::vector<std::string> TrainConfig::range_warnings() const {
  std::vector<std::string> w;
  if (hidden_layers < 1 || hidden_layers > 3) w.push_back("hidden_layers outside the tuned range 1-3");
  if (hidden_units != 128 && hidden_units != 256) w.push_back("hidden_units outside {128, 256}");
  if (batch_size != 128 && batch_size != 256 && batch_size != 1024) {
    w.push_back("batch_size outside {128, 256, 1024}");
  }
  if (learning_rate != 1e-3 && learning_rate != 1e-2) w.push_back("learning_rate outside {1e-3, 1e-2}");
  if (l2 != 1e-2 && l2 != 0.0) w.push_back("l2 outside {1e-2, 0}");
  return w;
}

KeyValueConfig TrainConfig::to_key_values() const {
  KeyValueConfig kv;
  kv.set("K", std::to_string(clusters));
  kv.set("hidden_layers", std::to_string(hidden_layers));
  kv.set("hidden_units", std::to_string(hidden_units));
  kv.set("batch_size", std::to_string(batch_size));
  kv.set("learning_rate", real_text(learning_rate));
  kv.set("activation", to_string(activation));
  kv.set("batch_norm", batch_norm ? "true" : "false");
  kv.set("l2", real_text(l2));
  kv.set("epochs", std::to_string(epochs));
  kv.set("early_stop_patience", std::to_string(early_stop_patience));
  kv.set("seed", std::to_string(seed));
  kv.set("tau", std::to_string(tau));
  kv.set("event_features", event_features ? "true" : "false");
  if (const auto* m = std::get_if<MMD>(&divergence)) {
    kv.set("divergence", "mmd");
    kv.set("mmd_bandwidth", real_text(m->bandwidth));
    kv.set("kuiper_clamp", "false");
  } else {
    kv.set("divergence", "kuiper_ub");
    kv.set("mmd_bandwidth", real_text(0.0));
    kv.set("kuiper_clamp", std::get<KuiperUB>(divergence).clamp ? "true" : "false");
  }
  kv.set("pair_sampling", sampling_text(pair_sampling));
  kv.set("grad_through_n", grad_through_n ? "true" : "false");
  kv.set("termination", to_string(termination));
  kv.set("w_fixed", std::to_string(w_fixed));
  kv.set("validation_fraction", real_text(validation_fraction));
  kv.set("min_cluster_size", real_text(min_cluster_size));
  return kv;
}

const std::vector<std::string>& TrainConfig::keys() {
  static const std::vector<std::string> k = {
      "K", "hidden_layers", "hidden_units", "batch_size", "learning_rate", "activation",
      "batch_norm", "l2", "epochs", "early_stop_patience", "seed", "tau", "event_features", "divergence",
      "mmd_bandwidth", "kuiper_clamp", "pair_sampling", "grad_through_n", "termination", "w_fixed",
      "validation_fraction", "min_cluster_size"};
  return k;
}

TrainConfig TrainConfig::from_key_values(const KeyValueConfig& kv) {
  TrainConfig c;
  c.clusters = kv.get_uint("K", c.clusters);
  c.hidden_layers = kv.get_uint("hidden_layers", c.hidden_layers);
  c.hidden_units = kv.get_uint("hidden_units", c.hidden_units);
  c.batch_size = kv.get_uint("batch_size", c.batch_size);
  c.learning_rate = kv.get_real("learning_rate", c.learning_rate);
  c.activation = parse_activation(kv.get_string("activation", to_string(c.activation)));
  c.batch_norm = kv.get_bool("batch_norm", c.batch_norm);
  c.l2 = kv.get_real("l2", c.l2);
  c.epochs = kv.get_uint("epochs", c.epochs);
  c.early_stop_patience = kv.get_uint("early_stop_patience", c.early_stop_patience);
  c.seed = kv.get_uint("seed", c.seed);
  c.tau = kv.get_int("tau", c.tau);
  c.event_features = kv.get_bool("event_features", c.event_features);
  const auto div = kv.get_string("divergence", "kuiper_ub");
  if (div == "kuiper_ub") {
    c.divergence = KuiperUB{kv.get_bool("kuiper_clamp", false)};
  } else if (div == "mmd") {
    c.divergence = MMD{kv.get_real("mmd_bandwidth", 0.0)};
  } else {
    throw ConfigError("divergence must be kuiper_ub or mmd");
  }
  c.pair_sampling = parse_sampling(kv.get_string("pair_sampling", "auto"));
  c.grad_through_n = kv.get_bool("grad_through_n", c.grad_through_n);
  c.termination = parse_termination_choice(kv.get_string("termination", "auto"));
  c.w_fixed = kv.get_int("w_fixed", c.w_fixed);
  c.validation_fraction = kv.get_real("validation_fraction", c.validation_fraction);
  c.min_cluster_size = kv.get_real("min_cluster_size", c.min_cluster_size);
  c.validate();
  return c;
}

LossBatch LossBatch::rows(std::span<const std::size_t> indices) const {
  LossBatch b;
  b.t_max = t_max;
  b.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  b.lifetimes.reserve(indices.size());
  b.inactive.reserve(indices.size());
  b.flags.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto i = indices[r];
    b.features.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(i));
    b.lifetimes.push_back(lifetimes[i]);
    b.inactive.push_back(inactive[i]);
    b.flags.push_back(flags[i]);
  }
  return b;
}

LossBatch make_loss_batch(const Dataset& data, const FeatureScaler& scaler,
                          const TrainConfig& config, std::int64_t t_max) {
  LossBatch b;
  b.t_max = t_max;
  b.features = scaler.transform(extract_feature_matrix(data, config.tau, config.event_features));
  for (std::size_t i = 0; i < data.size(); ++i) {
    b.lifetimes.push_back(data.observed_lifetimes()[i]);
    b.inactive.push_back(data.inactive_period(i));
    b.flags.push_back(data[i].last_termination_flag());
  }
  return b;
}

LossResult evaluate_loss(const ModelParams& params, const LossBatch& batch,
                         const TrainConfig& config, TerminationChoice termination,
                         Mode mode, std::mt19937_64* rng, bool with_gradient) {
  const std::size_t n = batch.size();
  if (n == 0) throw DataError("loss evaluated on an empty batch");

  // Termination probabilities and their sensitivity to log_rate.
  std::vector<double> beta(n), dbeta(n, 0.0);
  const double xi = std::exp(params.log_rate);
  for (std::size_t u = 0; u < n; ++u) {
    const auto chi = static_cast<double>(batch.inactive[u]);
    switch (termination) {
      case TerminationChoice::kObserved:
        if (!batch.flags[u]) throw DataError("termination signals unavailable");
        beta[u] = *batch.flags[u] ? 1.0 : 0.0;
        break;
      case TerminationChoice::kFixed:
        beta[u] = batch.inactive[u] > config.w_fixed ? 1.0 : 0.0;
        break;
      case TerminationChoice::kLearnable:
      case TerminationChoice::kAuto:
        beta[u] = -std::expm1(-xi * chi);
        dbeta[u] = xi * chi * std::exp(-xi * chi);
        break;
    }
  }

  LossResult result;
  result.pass = forward_pass(params, batch.features, mode);
  const KaplanMeierTape tape(batch.lifetimes, batch.t_max, result.pass.alpha, beta);
  const auto spec = config.divergence_spec();
  const auto objective =
      min_pair_objective(spec, tape.distributions(), rng, config.min_cluster_size);
  result.objective = objective.value;
  result.skipped_pairs = objective.skipped;

  const Eigen::VectorXd flat = params.flatten();
  const Eigen::VectorXd mask = params.weight_mask();
  const double penalty = 0.5 * config.l2 * (mask.array() * flat.array().square()).sum();
  result.loss = -objective.value.value_or(0.0) + penalty;
  if (!with_gradient) return result;

  result.gradient = config.l2 * mask.cwiseProduct(flat);
  if (!objective.value) return result;

  // Upstream gradients of the minimized loss (-objective) on the curves.
  const std::size_t k = tape.clusters();
  std::vector<std::vector<double>> value_grads(k);
  std::vector<double> n_grads(k, 0.0);
  const auto& d = objective.argmin_delta;
  value_grads[objective.cluster_a] = d.grad_a;
  value_grads[objective.cluster_b] = d.grad_b;
  for (auto idx : {objective.cluster_a, objective.cluster_b}) {
    for (auto& g : value_grads[idx]) g = -g;
  }
  n_grads[objective.cluster_a] = -d.grad_na;
  n_grads[objective.cluster_b] = -d.grad_nb;

  const auto km = tape.backward(value_grads, n_grads);
  result.gradient += backward(params, result.pass, km.alpha);
  double grad_log_rate = 0.0;
  for (std::size_t u = 0; u < n; ++u) grad_log_rate += km.beta(static_cast<Eigen::Index>(u)) * dbeta[u];
  result.gradient(result.gradient.size() - 1) += grad_log_rate;
  return result;
}

TrainResult train(const Dataset& data, const TrainConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  auto order = iota_indices(data.size());
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_val = static_cast<std::size_t>(
      std::llround(config.validation_fraction * static_cast<double>(data.size())));
  const std::span<const std::size_t> all(order);
  std::vector<std::size_t> val_idx(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> train_idx(all.begin() + static_cast<std::ptrdiff_t>(n_val), all.end());
  std::sort(val_idx.begin(), val_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return train(data.subset(train_idx), data.subset(val_idx), config);
}

TrainResult train(const Dataset& training, const Dataset& validation,
                  const TrainConfig& config) {
  config.validate();
  if (training.empty()) throw DataError("cannot train on an empty dataset");

  TrainResult result;
  result.warnings = config.range_warnings();
  const auto termination = resolve_termination(config.termination, training);
  if (termination == TerminationChoice::kObserved && !training.has_termination_signals()) {
    throw DataError("termination signals unavailable");
  }

  // Derived streams keep initialization, batching and pair sampling apart.
  std::seed_seq seq{config.seed, std::uint64_t{0x9e3779b97f4a7c15ULL}};
  std::array<std::uint64_t, 3> seeds{};
  seq.generate(seeds.begin(), seeds.end());
  std::mt19937_64 init_rng(seeds[0]), batch_rng(seeds[1]), pair_rng(seeds[2]);

  const Eigen::MatrixXd raw = extract_feature_matrix(training, config.tau, config.event_features);
  const auto scaler = FeatureScaler::fit(raw);
  const std::int64_t t_max = std::max(training.t_max(), validation.t_max());
  const LossBatch train_batch = make_loss_batch(training, scaler, config, t_max);
  const bool has_validation = !validation.empty();
  const LossBatch val_batch =
      has_validation ? make_loss_batch(validation, scaler, config, t_max) : LossBatch{};

  const double log_rate =
      termination == TerminationChoice::kLearnable ? initial_log_rate(training) : 0.0;
  ModelParams params = initialize_params(
      static_cast<std::size_t>(raw.cols()), config.clusters, config.hidden_layers,
      config.hidden_units, config.activation, config.batch_norm, log_rate, init_rng);

  TrainConfig val_config = config;
  val_config.pair_sampling = AllPairs{};

  Eigen::VectorXd flat = params.flatten();
  Adam adam(static_cast<std::size_t>(flat.size()), config.learning_rate);
  ModelParams best = params;
  double best_objective = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  const std::size_t n = training.size();
  const std::size_t batches = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(n) /
                                               static_cast<double>(config.batch_size))));
  auto order = iota_indices(n);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), batch_rng);
    EpochLog entry;
    entry.epoch = epoch;
    double objective_sum = 0.0;
    std::size_t objective_count = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t begin = b * n / batches;
      const std::size_t end = (b + 1) * n / batches;
      const std::span<const std::size_t> idx(order.data() + begin, end - begin);
      const auto batch = train_batch.rows(idx);
      const auto loss = evaluate_loss(params, batch, config, termination, Mode::kTraining, &pair_rng);
      entry.skipped_pairs += loss.skipped_pairs;
      if (!loss.objective) {
        ++entry.empty_batches;
        continue;
      }
      objective_sum += *loss.objective;
      ++objective_count;
      flat = params.flatten();
      adam.step(flat, loss.gradient);
      params.assign(flat);
      update_running_statistics(params, loss.pass);
    }
    // A collapsed assignment has no scorable pair and must never look best.
    entry.train_objective = objective_count ? objective_sum / static_cast<double>(objective_count)
                                            : -std::numeric_limits<double>::infinity();
    if (entry.empty_batches > 0) {
      result.warnings.push_back("epoch " + std::to_string(epoch) + ": " +
                                std::to_string(entry.empty_batches) +
                                " batch(es) had only degenerate cluster pairs");
    }

    if (has_validation) {
      const auto val = evaluate_loss(params, val_batch, val_config, termination,
                                     Mode::kInference, nullptr, false);
      entry.validation_objective =
          val.objective.value_or(-std::numeric_limits<double>::infinity());
    } else {
      entry.validation_objective = entry.train_objective;
    }
    entry.rate = std::exp(params.log_rate);

    if (entry.validation_objective > best_objective) {
      best_objective = entry.validation_objective;
      best = params;
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    entry.best_validation = best_objective;
    result.log.push_back(entry);
    if (config.early_stop_patience > 0 && since_best >= config.early_stop_patience) break;
  }

  result.model.params = config.epochs > 0 ? best : params;
  result.model.scaler = scaler;
  result.model.config = config;
  result.model.termination = termination;
  return result;
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,train_objective,validation_objective,best_validation,rate,skipped_pairs,empty_batches\n";
  for (const auto& e : log) {
    out << e.epoch << ',' << real_text(e.train_objective) << ','
        << real_text(e.validation_objective) << ',' << real_text(e.best_validation) << ','
        << real_text(e.rate) << ',' << e.skipped_pairs << ',' << e.empty_batches << '\n';
  }
}

std::vector<std::size_t> hard_labels(const Eigen::MatrixXd& alpha) {
  std::vector<std::size_t> labels(static_cast<std::size_t>(alpha.rows()), 0);
  for (Eigen::Index r = 0; r < alpha.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < alpha.cols(); ++c) {
      if (alpha(r, c) > alpha(r, best)) best = c;
    }
    labels[static_cast<std::size_t>(r)] = static_cast<std::size_t>(best);
  }
  return labels;
}

Assignment assign(const TrainedModel& model, const Dataset& data) {
  Assignment a;
  if (data.empty()) {
    a.alpha.resize(0, static_cast<Eigen::Index>(model.params.clusters()));
    return a;
  }
  const auto features = model.scaler.transform(extract_feature_matrix(data, model.config.tau, model.config.event_features));
  a.alpha = forward(model.params, features, Mode::kInference);
  a.labels = hard_labels(a.alpha);
  return a;
}

}  // namespace deepclife
