#ifndef DEEPCLIFE_SYNTH_HPP_
#define DEEPCLIFE_SYNTH_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "deepclife/dataset.hpp"

namespace deepclife {

/// The three simulated lifetime laws. C2 and C3 have proportional hazards
/// (S3 = S2^2); C1 is a fast/slow mixture whose CCDF crosses both.
enum class SynthCluster { kC1, kC2, kC3 };

std::string to_string(SynthCluster c);
SynthCluster parse_synth_cluster(const std::string& name);
/// Parses a comma-separated list such as "C1,C3".
std::vector<SynthCluster> parse_synth_clusters(const std::string& list);

struct SynthSpec {
  std::vector<SynthCluster> clusters{SynthCluster::kC1, SynthCluster::kC2, SynthCluster::kC3};
  std::size_t n_per_cluster = 10000;
  std::int64_t t_m = 150;
  /// First half low-variance (sigma^2 = 1), second half high-variance (10).
  std::size_t n_features = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  Dataset data;
  /// Position of each subject's generating cluster within spec.clusters.
  std::vector<std::size_t> labels;
};

/// Continuous-time survival function of a cluster's lifetime law.
double continuous_survival(SynthCluster cluster, double t);

/// P(T > t) of the discretized lifetime T = floor(continuous lifetime).
double discrete_survival(SynthCluster cluster, std::int64_t t);

SyntheticData generate(const SynthSpec& spec);

/// Writes `id,cluster,label` rows.
void write_labels_csv(const std::string& path, const SyntheticData& synth,
                      const SynthSpec& spec);

/// Reads the `label` column of a labels CSV, aligned with `data` by id.
std::vector<std::size_t> read_labels_csv(const std::string& path, const Dataset& data);

}  // namespace deepclife

#endif  // DEEPCLIFE_SYNTH_HPP_
