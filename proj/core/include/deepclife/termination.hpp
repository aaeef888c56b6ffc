#ifndef DEEPCLIFE_TERMINATION_HPP_
#define DEEPCLIFE_TERMINATION_HPP_

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "deepclife/dataset.hpp"

namespace deepclife {

/// beta is the recorded final termination flag.
struct ObservedSignals {};

/// beta = 1 - exp(-xi * chi) with xi = exp(log_rate) shared by all subjects.
struct LearnableExponential {
  double log_rate = 0.0;
  double rate() const;
};

/// beta = 1[chi > window].
struct FixedTimeout {
  std::int64_t window = 10;
};

using TerminationModel =
    std::variant<ObservedSignals, LearnableExponential, FixedTimeout>;

/// Probability that the subject's last observed event was terminal, given its
/// inactive period. Throws DataError("termination signals unavailable") for
/// ObservedSignals on a subject without flags.
double termination_probability(const SubjectRecord& subject,
                               std::int64_t inactive_period,
                               const TerminationModel& model);

/// Convenience overload reading chi from the enclosing dataset.
double termination_probability(const Dataset& data, std::size_t index,
                               const TerminationModel& model);

/// beta for every subject of `data`.
std::vector<double> termination_probabilities(const Dataset& data,
                                              const TerminationModel& model);

/// d beta / d log_rate for the learnable model; zero for the other variants.
std::vector<double> termination_log_rate_gradient(const Dataset& data,
                                                  const TerminationModel& model);

/// log_rate such that beta(median positive chi) = 0.5. Falls back to chi = 1
/// when no subject has a positive inactive period.
double initial_log_rate(const Dataset& data);

}  // namespace deepclife

#endif  // DEEPCLIFE_TERMINATION_HPP_
