#ifndef DEEPCLIFE_DATASET_HPP_
#define DEEPCLIFE_DATASET_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deepclife {

/// One subject: static covariates plus its activity trace inside the
/// observation window. All times are nonnegative integers (discrete units).
struct SubjectRecord {
  std::string id;
  std::vector<double> covariates;
  std::vector<std::int64_t> inter_event_times;
  /// Optional per-event covariates, one vector per inter-event time.
  std::vector<std::vector<double>> event_covariates;
  std::int64_t joining_time = 0;
  /// Optional per-event termination markers (0/1); only the last may be 1.
  std::optional<std::vector<std::uint8_t>> termination_flags;
  /// Ground-truth lifetime, known for simulated data only.
  std::optional<std::int64_t> true_lifetime;

  /// Sum of the inter-event times.
  std::int64_t observed_lifetime() const;

  /// Number of events whose time (relative to joining) is <= t - joining_time.
  std::int64_t event_count(std::int64_t t) const;

  /// Final termination flag, if termination signals are recorded.
  std::optional<bool> last_termination_flag() const;

  /// Throws DataError when the record violates a per-subject invariant.
  void validate() const;
};

/// A collection of subjects observed up to the measurement horizon t_m.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<SubjectRecord> subjects, std::int64_t t_m);

  const std::vector<SubjectRecord>& subjects() const { return subjects_; }
  std::size_t size() const { return subjects_.size(); }
  bool empty() const { return subjects_.empty(); }
  const SubjectRecord& operator[](std::size_t i) const { return subjects_[i]; }

  std::int64_t t_m() const { return t_m_; }
  /// Largest observed lifetime over all subjects (0 for an empty dataset).
  std::int64_t t_max() const { return t_max_; }

  /// Observed lifetimes H, cached at construction.
  std::span<const std::int64_t> observed_lifetimes() const { return lifetimes_; }

  /// Inactive period chi = t_m - joining_time - H of subject i.
  std::int64_t inactive_period(std::size_t i) const;

  /// True when every subject carries termination flags.
  bool has_termination_signals() const;

  /// Number of covariates (0 for an empty dataset).
  std::size_t covariate_count() const;

  /// Dataset restricted to `indices`, keeping t_m. t_max is recomputed.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<SubjectRecord> subjects_;
  std::vector<std::int64_t> lifetimes_;
  std::int64_t t_m_ = 0;
  std::int64_t t_max_ = 0;
};

/// Reads the subject CSV format:
///   id,joining_time,inter_event_times,termination_flag,true_lifetime,cov_0..
/// `inter_event_times` is a semicolon-joined list of integers; the flag and
/// true lifetime columns may be empty. A header row is required.
Dataset read_dataset_csv(std::istream& in, std::int64_t t_m);
Dataset read_dataset_csv(const std::string& path, std::int64_t t_m);

void write_dataset_csv(std::ostream& out, const Dataset& data);
void write_dataset_csv(const std::string& path, const Dataset& data);

/// Parses a base-10 integer, rejecting fractional or trailing characters.
std::int64_t parse_integer(std::string_view text, std::string_view what);

/// Parses a finite floating point value.
double parse_real(std::string_view text, std::string_view what);

/// Splits a CSV line on commas (no quoting support; fields are trimmed).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace deepclife

#endif  // DEEPCLIFE_DATASET_HPP_
