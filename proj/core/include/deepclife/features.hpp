#ifndef DEEPCLIFE_FEATURES_HPP_
#define DEEPCLIFE_FEATURES_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "deepclife/dataset.hpp"

namespace deepclife {

/// Number of event summary statistics appended after the covariates.
inline constexpr std::size_t kEventStatistics = 6;

/// Covariates followed by summary statistics of the events that happen within
/// `tau` time units of joining: count, mean, variance, min and max of their
/// inter-event times, and the time of the last such event. An empty window
/// yields zeros.
std::vector<double> extract_features(const SubjectRecord& subject, std::int64_t tau);

/// Row-per-subject feature matrix. Without event statistics only the
/// covariates are used.
Eigen::MatrixXd extract_feature_matrix(const Dataset& data, std::int64_t tau,
                                       bool event_statistics = true);

/// Per-column standardization fitted on training features. Columns with zero
/// spread are centred only.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static FeatureScaler fit(const Eigen::MatrixXd& features);
  Eigen::MatrixXd transform(const Eigen::MatrixXd& features) const;
};

}  // namespace deepclife

#endif  // DEEPCLIFE_FEATURES_HPP_
