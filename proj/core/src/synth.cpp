#include "deepclife/synth.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

// C2: Weibull(shape 1.5, scale 80). C3: hazard of C2 scaled by kHazardRatio.
constexpr double kShape = 1.5;
constexpr double kScale = 80.0;
constexpr double kHazardRatio = 2.0;
// C1: with probability kFastWeight an exponential lifetime of mean kFastScale,
// otherwise Weibull(kSlowShape, kSlowScale).
constexpr double kFastWeight = 0.2;
constexpr double kFastScale = 5.0;
constexpr double kSlowScale = 100.0;
constexpr double kSlowShape = 3.0;

constexpr std::size_t kModes = 3;
constexpr double kMeanRange = 30.0;

double weibull_survival(double t, double scale, double shape, double hazard_scale) {
  if (t <= 0.0) return 1.0;
  return std::exp(-hazard_scale * std::pow(t / scale, shape));
}

// Inverse transform: S(t) = u.
double weibull_quantile(double u, double scale, double shape, double hazard_scale) {
  return scale * std::pow(-std::log(u) / hazard_scale, 1.0 / shape);
}

double open_unit(std::mt19937_64& rng) {
  // (0, 1], avoids log(0).
  return 1.0 - std::generate_canonical<double, 53>(rng);
}

double sample_lifetime(SynthCluster c, std::mt19937_64& rng) {
  switch (c) {
    case SynthCluster::kC1:
      if (std::generate_canonical<double, 53>(rng) < kFastWeight) {
        return -kFastScale * std::log(open_unit(rng));
      }
      return weibull_quantile(open_unit(rng), kSlowScale, kSlowShape, 1.0);
    case SynthCluster::kC2:
      return weibull_quantile(open_unit(rng), kScale, kShape, 1.0);
    case SynthCluster::kC3:
      return weibull_quantile(open_unit(rng), kScale, kShape, kHazardRatio);
  }
  return 0.0;
}

}  // namespace

std::string to_string(SynthCluster c) {
  switch (c) {
    case SynthCluster::kC1: return "C1";
    case SynthCluster::kC2: return "C2";
    case SynthCluster::kC3: return "C3";
  }
  return "C1";
}

SynthCluster parse_synth_cluster(const std::string& name) {
  if (name == "C1") return SynthCluster::kC1;
  if (name == "C2") return SynthCluster::kC2;
  if (name == "C3") return SynthCluster::kC3;
  throw ConfigError("unknown synthetic cluster '" + name + "' (expected C1, C2 or C3)");
}

std::vector<SynthCluster> parse_synth_clusters(const std::string& list) {
  std::vector<SynthCluster> out;
  for (const auto& field : split_csv_line(list)) {
    const auto c = parse_synth_cluster(field);
    for (const auto existing : out) {
      if (existing == c) throw ConfigError("cluster " + field + " listed twice");
    }
    out.push_back(c);
  }
  return out;
}

void SynthSpec::validate() const {
  if (clusters.empty()) throw ConfigError("at least one synthetic cluster is required");
  if (t_m <= 0) throw ConfigError("t_m must be positive");
  if (n_features == 0) throw ConfigError("n_features must be positive");
}

double continuous_survival(SynthCluster cluster, double t) {
  switch (cluster) {
    case SynthCluster::kC1:
      return kFastWeight * (t <= 0.0 ? 1.0 : std::exp(-t / kFastScale)) +
             (1.0 - kFastWeight) * weibull_survival(t, kSlowScale, kSlowShape, 1.0);
    case SynthCluster::kC2:
      return weibull_survival(t, kScale, kShape, 1.0);
    case SynthCluster::kC3:
      return weibull_survival(t, kScale, kShape, kHazardRatio);
  }
  return 1.0;
}

double discrete_survival(SynthCluster cluster, std::int64_t t) {
  // floor(X) > t  <=>  X >= t + 1.
  return continuous_survival(cluster, static_cast<double>(t + 1));
}

SyntheticData generate(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 master(spec.seed);

  // Mixture means for every cluster, drawn up front so a cluster's features
  // do not depend on which other clusters are requested.
  std::uniform_real_distribution<double> mean_dist(0.0, kMeanRange);
  std::array<std::vector<std::array<double, kModes>>, 3> means;
  for (auto& per_cluster : means) {
    per_cluster.resize(spec.n_features);
    for (auto& modes : per_cluster) {
      for (auto& m : modes) m = mean_dist(master);
    }
  }
  std::array<std::uint64_t, 3> cluster_seeds{master(), master(), master()};

  const std::size_t low_variance = spec.n_features / 2 + spec.n_features % 2;
  std::vector<SubjectRecord> subjects;
  std::vector<std::size_t> labels;
  subjects.reserve(spec.clusters.size() * spec.n_per_cluster);
  for (std::size_t pos = 0; pos < spec.clusters.size(); ++pos) {
    const auto cluster = spec.clusters[pos];
    const auto ci = static_cast<std::size_t>(cluster);
    std::mt19937_64 rng(cluster_seeds[ci]);
    std::uniform_int_distribution<std::size_t> mode_dist(0, kModes - 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < spec.n_per_cluster; ++i) {
      SubjectRecord s;
      s.id = to_string(cluster) + "_" + std::to_string(i);
      s.covariates.resize(spec.n_features);
      for (std::size_t f = 0; f < spec.n_features; ++f) {
        const double sd = f < low_variance ? 1.0 : std::sqrt(10.0);
        s.covariates[f] = means[ci][f][mode_dist(rng)] + sd * noise(rng);
      }
      const auto lifetime = static_cast<std::int64_t>(std::floor(sample_lifetime(cluster, rng)));
      const std::int64_t window = spec.t_m;  // joining time is 0
      s.true_lifetime = lifetime;
      const std::int64_t observed = std::min(lifetime, window);
      s.inter_event_times = {observed};
      s.termination_flags = std::vector<std::uint8_t>{static_cast<std::uint8_t>(lifetime <= window)};
      subjects.push_back(std::move(s));
      labels.push_back(pos);
    }
  }
  return {Dataset(std::move(subjects), spec.t_m), std::move(labels)};
}

void write_labels_csv(const std::string& path, const SyntheticData& synth, const SynthSpec& spec) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write labels file " + path);
  out << "id,cluster,label\n";
  for (std::size_t i = 0; i < synth.data.size(); ++i) {
    out << synth.data[i].id << ',' << to_string(spec.clusters[synth.labels[i]]) << ','
        << synth.labels[i] << '\n';
  }
  if (!out) throw DataError("failed writing labels file " + path);
}

std::vector<std::size_t> read_labels_csv(const std::string& path, const Dataset& data) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open labels file " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("labels file is empty");
  const auto header = split_csv_line(line);
  std::size_t id_col = header.size(), label_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "id") id_col = c;
    if (header[c] == "label") label_col = c;
  }
  if (id_col == header.size() || label_col == header.size()) {
    throw DataError("labels file needs id and label columns");
  }
  std::unordered_map<std::string, std::size_t> by_id;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) throw DataError("labels file: ragged row");
    const auto label = parse_integer(fields[label_col], "label");
    if (label < 0) throw DataError("labels file: negative label");
    by_id[fields[id_col]] = static_cast<std::size_t>(label);
  }
  std::vector<std::size_t> labels(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto it = by_id.find(data[i].id);
    if (it == by_id.end()) throw DataError("no label for subject " + data[i].id);
    labels[i] = it->second;
  }
  return labels;
}

}  // namespace deepclife
