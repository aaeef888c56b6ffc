#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <deque>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "deepclife/config.hpp"
#include "deepclife/cross_validation.hpp"
#include "deepclife/dataset.hpp"
#include "deepclife/error.hpp"
#include "deepclife/evaluation.hpp"
#include "deepclife/kaplan_meier.hpp"
#include "deepclife/kuiper.hpp"
#include "deepclife/synth.hpp"
#include "deepclife/trainer.hpp"

namespace deepclife::cli {

namespace {

namespace fs = std::filesystem;

// Keys understood in addition to the training keys.
const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> k = {"t_m",   "data",    "truth",          "model",
                                             "folds", "n_train", "random_control", "l2_grid"};
  return k;
}

std::string real_text(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Named flags that override config-file entries when given.
class Overrides {
 public:
  void option(CLI::App* app, const std::string& flags, const std::string& key,
              const std::string& help) {
    auto& slot = slots_.emplace_back();
    slot.key = key;
    slot.option = app->add_option(flags, slot.value, help);
  }

  void flag(CLI::App* app, const std::string& flags, const std::string& key,
            const std::string& help) {
    auto& slot = slots_.emplace_back();
    slot.key = key;
    slot.value = "true";
    slot.option = app->add_flag(flags, help);
  }

  void apply(KeyValueConfig& kv) const {
    for (const auto& s : slots_) {
      if (s.option->count() > 0) kv.set(s.key, s.value);
    }
  }

 private:
  struct Slot {
    std::string key;
    std::string value;
    CLI::Option* option = nullptr;
  };
  std::deque<Slot> slots_;
};

struct Common {
  std::string config_path;
  std::vector<std::string> assignments;
  Overrides overrides;
  std::string out;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Flat key = value config file")
      ->check(CLI::ExistingFile);
  app->add_option("--set", c.assignments, "Extra key=value override (repeatable)");
  c.overrides.option(app, "--data", "data", "Dataset CSV");
  c.overrides.option(app, "--tm", "t_m", "Measurement horizon t_m");
}

void add_training_flags(CLI::App* app, Common& c) {
  auto& o = c.overrides;
  o.option(app, "-K,--clusters", "K", "Number of clusters");
  o.option(app, "--seed", "seed", "Random seed");
  o.option(app, "--tau", "tau", "Initial observation window for event features");
  o.option(app, "--event-features", "event_features", "Use event summary features (true/false)");
  o.option(app, "--divergence", "divergence", "kuiper_ub or mmd");
  o.option(app, "--termination", "termination", "auto, observed, learnable or fixed");
  o.option(app, "--w-fixed", "w_fixed", "Timeout window for fixed termination and evaluation");
  o.option(app, "--epochs", "epochs", "Maximum number of epochs");
  o.option(app, "--patience", "early_stop_patience", "Early-stopping patience in epochs");
  o.option(app, "--batch-size", "batch_size", "Minibatch size");
  o.option(app, "--learning-rate", "learning_rate", "Adam learning rate");
  o.option(app, "--hidden-layers", "hidden_layers", "Number of hidden layers");
  o.option(app, "--hidden-units", "hidden_units", "Units per hidden layer");
  o.option(app, "--l2", "l2", "L2 penalty on weights");
}

KeyValueConfig resolve(const Common& c) {
  KeyValueConfig kv = TrainConfig{}.to_key_values();
  if (!c.config_path.empty()) kv.merge(KeyValueConfig::load(c.config_path));
  c.overrides.apply(kv);
  for (const auto& a : c.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("--set expects key=value, got '" + a + "'");
    }
    kv.set(a.substr(0, eq), a.substr(eq + 1));
  }
  auto known = TrainConfig::keys();
  known.insert(known.end(), run_keys().begin(), run_keys().end());
  const auto unknown = kv.unknown_keys(known);
  if (!unknown.empty()) throw ConfigError("unknown config key '" + unknown.front() + "'");
  return kv;
}

std::string require(const KeyValueConfig& kv, const std::string& key) {
  const auto v = kv.get(key);
  if (!v || v->empty()) throw ConfigError("missing required setting '" + key + "'");
  return *v;
}

std::int64_t horizon(const KeyValueConfig& kv) {
  const auto t_m = parse_integer(require(kv, "t_m"), "t_m");
  if (t_m < 0) throw ConfigError("t_m must be nonnegative");
  return t_m;
}

/// Training settings with run keys copied alongside, as written to config.txt.
KeyValueConfig echo(const KeyValueConfig& kv, const TrainConfig& config) {
  KeyValueConfig out = config.to_key_values();
  for (const auto& key : run_keys()) {
    if (const auto v = kv.get(key)) out.set(key, *v);
  }
  return out;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path default_run_dir(std::uint64_t seed) {
  const std::string base = "run/" + timestamp() + "-" + std::to_string(seed);
  fs::path dir = base;
  for (int i = 1; fs::exists(dir); ++i) dir = base + "." + std::to_string(i);
  return dir;
}

/// Output directory written under a `.partial` name and renamed on commit;
/// removed if never committed.
class StagedDir {
 public:
  explicit StagedDir(fs::path final_dir)
      : final_(std::move(final_dir)), staging_(final_.string() + ".partial") {
    if (fs::exists(final_)) {
      throw ConfigError("output directory " + final_.string() + " already exists");
    }
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  StagedDir(const StagedDir&) = delete;
  StagedDir& operator=(const StagedDir&) = delete;
  ~StagedDir() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  fs::path file(const std::string& name) const { return staging_ / name; }
  const fs::path& final_path() const { return final_; }

  void commit() {
    fs::rename(staging_, final_);
    committed_ = true;
  }

 private:
  fs::path final_;
  fs::path staging_;
  bool committed_ = false;
};

/// Set of output files written as `<name>.partial` and renamed together.
class StagedFiles {
 public:
  StagedFiles() = default;
  StagedFiles(const StagedFiles&) = delete;
  StagedFiles& operator=(const StagedFiles&) = delete;
  ~StagedFiles() {
    if (!committed_) {
      std::error_code ec;
      for (const auto& f : finals_) fs::remove(f.string() + ".partial", ec);
    }
  }

  fs::path add(const fs::path& final_path) {
    if (final_path.has_parent_path()) fs::create_directories(final_path.parent_path());
    finals_.push_back(final_path);
    return final_path.string() + ".partial";
  }

  void commit() {
    for (const auto& f : finals_) fs::rename(f.string() + ".partial", f);
    committed_ = true;
  }

 private:
  std::vector<fs::path> finals_;
  bool committed_ = false;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw DataError("failed writing " + path.string());
}

void write_config(const fs::path& path, const KeyValueConfig& kv) {
  auto out = open_out(path);
  kv.write(out);
  close_out(out, path);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string clusters = "C1,C2,C3";
  std::size_t n = 10000;
  std::int64_t t_m = 150;
  std::size_t features = 20;
  std::uint64_t seed = 0;
  std::string out;
};

fs::path sibling(const fs::path& data_path, const std::string& suffix) {
  fs::path p = data_path;
  p.replace_extension();
  return p.string() + suffix;
}

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  SynthSpec spec;
  spec.clusters = parse_synth_clusters(a.clusters);
  spec.n_per_cluster = a.n;
  spec.t_m = a.t_m;
  spec.n_features = a.features;
  spec.seed = a.seed;
  const auto synth = generate(spec);

  const fs::path data_path = a.out;
  const fs::path labels_path = sibling(data_path, ".labels.csv");
  const fs::path config_path = sibling(data_path, ".config.txt");
  StagedFiles files;
  write_dataset_csv(files.add(data_path).string(), synth.data);
  write_labels_csv(files.add(labels_path).string(), synth, spec);

  KeyValueConfig kv;
  kv.set("clusters", a.clusters);
  kv.set("n_per_cluster", std::to_string(a.n));
  kv.set("t_m", std::to_string(a.t_m));
  kv.set("n_features", std::to_string(a.features));
  kv.set("seed", std::to_string(a.seed));
  write_config(files.add(config_path), kv);
  files.commit();

  out << "data = " << data_path.string() << '\n';
  out << "labels = " << labels_path.string() << '\n';
  out << "subjects = " << synth.data.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const Common& c, std::ostream& out) {
  const auto kv = resolve(c);
  const auto config = TrainConfig::from_key_values(kv);
  const auto data = read_dataset_csv(require(kv, "data"), horizon(kv));

  StagedDir dir(c.out.empty() ? default_run_dir(config.seed) : fs::path(c.out));
  write_config(dir.file("config.txt"), echo(kv, config));
  const auto result = train(data, config);
  save_checkpoint(dir.file("model.ckpt").string(), result.model);
  {
    const auto path = dir.file("training_log.csv");
    auto log = open_out(path);
    write_training_log(log, result.log);
    close_out(log, path);
  }
  {
    const auto path = dir.file("warnings.txt");
    auto w = open_out(path);
    for (const auto& line : config.range_warnings()) w << line << '\n';
    for (const auto& line : result.warnings) w << line << '\n';
    close_out(w, path);
  }
  dir.commit();

  out << "run_dir = " << dir.final_path().string() << '\n';
  out << "best_epoch = " << result.best_epoch << '\n';
  out << "epochs_run = " << result.log.size() << '\n';
  if (!result.log.empty()) {
    out << "best_validation = " << real_text(result.log.back().best_validation) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- assign

void write_assignment(std::ostream& out, const Dataset& data, const Assignment& a) {
  out << "id,label";
  for (Eigen::Index k = 0; k < a.alpha.cols(); ++k) out << ",alpha_" << k;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data[i].id << ',' << a.labels[i];
    for (Eigen::Index k = 0; k < a.alpha.cols(); ++k) {
      out << ',' << real_text(a.alpha(static_cast<Eigen::Index>(i), k));
    }
    out << '\n';
  }
}

int cmd_assign(const Common& c, const std::string& model_path, std::ostream& out) {
  const auto kv = resolve(c);
  if (c.out.empty()) throw ConfigError("assign needs --out");
  const auto model = load_checkpoint(model_path);
  const auto data = read_dataset_csv(require(kv, "data"), horizon(kv));
  const auto assignment = assign(model, data);

  StagedFiles files;
  const fs::path path = c.out;
  {
    const auto staged = files.add(path);
    auto f = open_out(staged);
    write_assignment(f, data, assignment);
    close_out(f, staged);
  }
  files.commit();
  out << "assignments = " << path.string() << '\n';
  out << "subjects = " << data.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string assignments;
  std::string model;
  std::optional<std::size_t> clusters;
};

int cmd_eval(const Common& c, const EvalArgs& a, std::ostream& out) {
  const auto kv = resolve(c);
  if (a.assignments.empty() == a.model.empty()) {
    throw ConfigError("eval needs exactly one of --assignments or --model");
  }
  const auto data = read_dataset_csv(require(kv, "data"), horizon(kv));

  std::vector<std::size_t> labels;
  std::size_t clusters = 0;
  if (!a.model.empty()) {
    const auto model = load_checkpoint(a.model);
    labels = assign(model, data).labels;
    clusters = model.params.clusters();
  } else {
    labels = read_labels_csv(a.assignments, data);
    for (const auto l : labels) clusters = std::max(clusters, l + 1);
  }
  if (a.clusters) {
    for (const auto l : labels) {
      if (l >= *a.clusters) throw DataError("label " + std::to_string(l) + " is not below K");
    }
    clusters = *a.clusters;
  }

  std::optional<std::vector<std::size_t>> truth;
  if (const auto path = kv.get("truth"); path && !path->empty()) {
    truth = read_labels_csv(*path, data);
  }
  EvalOptions options;
  options.w_fixed = kv.get_int("w_fixed", options.w_fixed);

  std::vector<EmpiricalLifetimeDistribution> curves;
  const auto report = evaluate_clustering(
      data, labels, clusters,
      truth ? std::optional<std::span<const std::size_t>>(*truth) : std::nullopt, options,
      &curves);

  if (!c.out.empty()) {
    StagedDir dir{fs::path(c.out)};
    KeyValueConfig echoed;
    for (const auto& key : {"data", "t_m", "truth", "w_fixed"}) {
      if (const auto v = kv.get(key)) echoed.set(key, *v);
    }
    echoed.set("assignments", a.assignments);
    echoed.set("model", a.model);
    echoed.set("K", std::to_string(clusters));
    write_config(dir.file("config.txt"), echoed);
    {
      const auto path = dir.file("report.txt");
      auto f = open_out(path);
      write_report(f, report);
      close_out(f, path);
    }
    {
      const auto path = dir.file("curves.csv");
      auto f = open_out(path);
      write_curves_csv(f, curves);
      close_out(f, path);
    }
    dir.commit();
  }
  write_report(out, report);
  return kExitOk;
}

// ---------------------------------------------------------------- kuiper-test

struct Sample {
  std::vector<std::int64_t> lifetimes;
  std::vector<double> beta;
};

// One lifetime per line with an optional second column that is 1 for a
// censored observation. A non-numeric first line is taken as a header.
Sample read_sample(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sample file " + path);
  Sample s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;
    const auto fields = split_csv_line(line);
    const std::string where = path + ":" + std::to_string(line_no);
    std::int64_t lifetime = 0;
    try {
      lifetime = parse_integer(fields[0], where + " lifetime");
    } catch (const DataError&) {
      if (s.lifetimes.empty() && line_no == 1) continue;
      throw;
    }
    if (lifetime < 0) throw DataError(where + ": negative lifetime");
    std::int64_t censored = 0;
    if (fields.size() > 1 && !fields[1].empty()) {
      censored = parse_integer(fields[1], where + " censor flag");
      if (censored != 0 && censored != 1) throw DataError(where + ": censor flag must be 0 or 1");
    }
    if (fields.size() > 2) throw DataError(where + ": expected at most two columns");
    s.lifetimes.push_back(lifetime);
    s.beta.push_back(censored ? 0.0 : 1.0);
  }
  if (s.lifetimes.empty()) throw DataError("sample file " + path + " has no lifetimes");
  return s;
}

struct KuiperArgs {
  std::string a, b;
  int terms = kReferenceTerms;
  bool no_reference = false;
};

int cmd_kuiper(const KuiperArgs& args, std::ostream& out) {
  if (args.terms <= 0) throw ConfigError("--terms must be positive");
  const auto a = read_sample(args.a);
  const auto b = read_sample(args.b);
  const std::int64_t t_max =
      std::max(*std::max_element(a.lifetimes.begin(), a.lifetimes.end()),
               *std::max_element(b.lifetimes.begin(), b.lifetimes.end()));
  const std::vector<double> ones_a(a.lifetimes.size(), 1.0), ones_b(b.lifetimes.size(), 1.0);
  const auto s_a = weighted_kaplan_meier(a.lifetimes, t_max, ones_a, a.beta);
  const auto s_b = weighted_kaplan_meier(b.lifetimes, t_max, ones_b, b.beta);
  const auto r = kuiper_test(s_a, s_b, !args.no_reference, args.terms);

  out << "n_a = " << a.lifetimes.size() << '\n';
  out << "n_b = " << b.lifetimes.size() << '\n';
  out << "d_plus = " << real_text(r.d_plus) << '\n';
  out << "d_minus = " << real_text(r.d_minus) << '\n';
  out << "v_stat = " << real_text(r.v_stat) << '\n';
  out << "effective_m = " << real_text(r.effective_m) << '\n';
  out << "lambda = " << real_text(r.lambda) << '\n';
  out << "p_lower = " << real_text(r.p_lower) << '\n';
  out << "p_upper = " << real_text(r.p_upper) << '\n';
  if (r.p_reference) out << "p_reference = " << real_text(*r.p_reference) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- cv

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& field : split_csv_line(text)) out.push_back(parse_real(field, what));
  return out;
}

int cmd_cv(const Common& c, std::ostream& out) {
  const auto kv = resolve(c);
  const auto config = TrainConfig::from_key_values(kv);
  const auto data = read_dataset_csv(require(kv, "data"), horizon(kv));

  CvOptions options;
  options.folds = kv.get_uint("folds", options.folds);
  options.n_train = kv.get_uint("n_train", options.n_train);
  options.random_control = kv.get_bool("random_control", options.random_control);
  options.w_fixed = config.w_fixed;
  options.l2_grid = parse_real_list(kv.get_string("l2_grid", ""), "l2_grid");
  for (const double l2 : options.l2_grid) {
    if (!(l2 >= 0.0)) throw ConfigError("l2_grid entries must be nonnegative");
  }

  std::optional<std::vector<std::size_t>> truth;
  if (const auto path = kv.get("truth"); path && !path->empty()) {
    truth = read_labels_csv(*path, data);
  }

  StagedDir dir(c.out.empty() ? default_run_dir(config.seed) : fs::path(c.out));
  KeyValueConfig echoed = echo(kv, config);
  echoed.set("folds", std::to_string(options.folds));
  echoed.set("n_train", std::to_string(options.n_train));
  echoed.set("random_control", options.random_control ? "true" : "false");
  echoed.set("l2_grid", kv.get_string("l2_grid", ""));
  write_config(dir.file("config.txt"), echoed);

  const auto result = cross_validate(
      data, config, options,
      truth ? std::optional<std::span<const std::size_t>>(*truth) : std::nullopt);
  {
    const auto path = dir.file("report.txt");
    auto f = open_out(path);
    write_cv_report(f, result);
    close_out(f, path);
  }
  dir.commit();

  out << "run_dir = " << dir.final_path().string() << '\n';
  out << "c_index.mean = " << real_text(result.c_index.mean) << '\n';
  if (result.ari) out << "ari.mean = " << real_text(result.ari->mean) << '\n';
  if (result.control_c_index) {
    out << "control.c_index.mean = " << real_text(result.control_c_index->mean) << '\n';
  }
  return kExitOk;
}

int dispatch(CLI::App& app, CLI::App* synth, const SynthArgs& synth_args, CLI::App* train_cmd,
             const Common& train_common, CLI::App* assign_cmd, const Common& assign_common,
             const std::string& model_path, CLI::App* eval_cmd, const Common& eval_common,
             const EvalArgs& eval_args, CLI::App* kuiper, const KuiperArgs& kuiper_args,
             CLI::App* cv, const Common& cv_common, std::ostream& out) {
  (void)app;
  if (synth->parsed()) return cmd_synth(synth_args, out);
  if (train_cmd->parsed()) return cmd_train(train_common, out);
  if (assign_cmd->parsed()) return cmd_assign(assign_common, model_path, out);
  if (eval_cmd->parsed()) return cmd_eval(eval_common, eval_args, out);
  if (kuiper->parsed()) return cmd_kuiper(kuiper_args, out);
  if (cv->parsed()) return cmd_cv(cv_common, out);
  return kExitUsage;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lifetime clustering by divergence maximization", "deepclife"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic clustered lifetime dataset");
  synth->add_option("--clusters", synth_args.clusters, "Comma-separated subset of C1,C2,C3")
      ->capture_default_str();
  synth->add_option("--n", synth_args.n, "Subjects per cluster")->capture_default_str();
  synth->add_option("--tm", synth_args.t_m, "Measurement horizon")->capture_default_str();
  synth->add_option("--features", synth_args.features, "Number of covariates")
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", synth_args.out, "Dataset CSV to write")->required();

  Common train_common;
  auto* train_cmd = app.add_subcommand("train", "Train a clustering model");
  add_common(train_cmd, train_common);
  add_training_flags(train_cmd, train_common);
  train_cmd->add_option("--out", train_common.out, "Run directory (default run/<time>-<seed>)");

  Common assign_common;
  std::string model_path;
  auto* assign_cmd = app.add_subcommand("assign", "Assign subjects to clusters with a model");
  add_common(assign_cmd, assign_common);
  assign_cmd->add_option("--model", model_path, "Checkpoint file")->required();
  assign_cmd->add_option("--out", assign_common.out, "Assignment CSV to write")->required();

  Common eval_common;
  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Score a clustering");
  add_common(eval_cmd, eval_common);
  eval_common.overrides.option(eval_cmd, "--truth", "truth", "Ground-truth labels CSV");
  eval_common.overrides.option(eval_cmd, "--w-fixed", "w_fixed",
                               "Timeout window when the data has no termination flags");
  eval_cmd->add_option("--assignments", eval_args.assignments, "Assignment CSV (id,label,...)");
  eval_cmd->add_option("--model", eval_args.model, "Checkpoint to assign with");
  eval_cmd->add_option("-K,--clusters", eval_args.clusters, "Number of clusters");
  eval_cmd->add_option("--out", eval_common.out, "Directory for report.txt and curves.csv");

  KuiperArgs kuiper_args;
  auto* kuiper = app.add_subcommand("kuiper-test", "Two-sample Kuiper test on lifetime samples");
  kuiper->add_option("--a", kuiper_args.a, "First sample")->required()->check(CLI::ExistingFile);
  kuiper->add_option("--b", kuiper_args.b, "Second sample")->required()->check(CLI::ExistingFile);
  kuiper->add_option("--terms", kuiper_args.terms, "Series terms for the reference p-value")
      ->capture_default_str();
  kuiper->add_flag("--no-reference", kuiper_args.no_reference, "Skip the reference series");

  Common cv_common;
  auto* cv = app.add_subcommand("cv", "K-fold cross-validation");
  add_common(cv, cv_common);
  add_training_flags(cv, cv_common);
  cv_common.overrides.option(cv, "--truth", "truth", "Ground-truth labels CSV");
  cv_common.overrides.option(cv, "--folds", "folds", "Number of folds");
  cv_common.overrides.option(cv, "--n-train", "n_train", "Training subjects per fold (0 = all)");
  cv_common.overrides.option(cv, "--l2-grid", "l2_grid", "L2 values selected by validation");
  cv_common.overrides.flag(cv, "--control", "random_control", "Score a random assignment too");
  cv->add_option("--out", cv_common.out, "Run directory (default run/<time>-<seed>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return dispatch(app, synth, synth_args, train_cmd, train_common, assign_cmd, assign_common,
                    model_path, eval_cmd, eval_common, eval_args, kuiper, kuiper_args, cv,
                    cv_common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace deepclife::cli
