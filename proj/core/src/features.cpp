#include "deepclife/features.hpp"

#include <algorithm>

#include "deepclife/error.hpp"

namespace deepclife {

std::vector<double> extract_features(const SubjectRecord& subject, std::int64_t tau) {
  if (tau <= 0) throw ConfigError("tau must be positive");
  std::vector<double> out(subject.covariates.begin(), subject.covariates.end());

  std::int64_t elapsed = 0;
  double count = 0.0, sum = 0.0, sum_sq = 0.0, last = 0.0;
  double lo = 0.0, hi = 0.0;
  for (const auto gap : subject.inter_event_times) {
    elapsed += gap;
    if (elapsed > tau) break;
    const auto y = static_cast<double>(gap);
    if (count == 0.0) {
      lo = hi = y;
    } else {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    count += 1.0;
    sum += y;
    sum_sq += y * y;
    last = static_cast<double>(elapsed);
  }
  const double mean = count > 0.0 ? sum / count : 0.0;
  const double variance = count > 0.0 ? std::max(0.0, sum_sq / count - mean * mean) : 0.0;
  out.insert(out.end(), {count, mean, variance, lo, hi, last});
  return out;
}

Eigen::MatrixXd extract_feature_matrix(const Dataset& data, std::int64_t tau,
                                       bool event_statistics) {
  const auto width = static_cast<Eigen::Index>(data.covariate_count() +
                                               (event_statistics ? kEventStatistics : 0));
  Eigen::MatrixXd features(static_cast<Eigen::Index>(data.size()), width);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = extract_features(data[i], tau);
    features.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(row.data(), width);
  }
  return features;
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw DataError("cannot fit a feature scaler on no rows");
  FeatureScaler s;
  s.mean = features.colwise().mean().transpose();
  const Eigen::MatrixXd centred = features.rowwise() - s.mean.transpose();
  s.scale = (centred.array().square().colwise().sum() / static_cast<double>(features.rows()))
                .sqrt()
                .transpose();
  for (Eigen::Index c = 0; c < s.scale.size(); ++c) {
    if (!(s.scale(c) > 1e-12)) s.scale(c) = 1.0;
  }
  return s;
}

Eigen::MatrixXd FeatureScaler::transform(const Eigen::MatrixXd& features) const {
  if (features.cols() != mean.size()) {
    throw DataError("feature width does not match the fitted scaler");
  }
  return (features.rowwise() - mean.transpose()).array().rowwise() /
         scale.transpose().array();
}

}  // namespace deepclife
