#include "deepclife/termination.hpp"

#include <algorithm>
#include <cmath>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

double LearnableExponential::rate() const { return std::exp(log_rate); }

double termination_probability(const SubjectRecord& subject,
                               std::int64_t inactive_period,
                               const TerminationModel& model) {
  if (inactive_period < 0) throw DataError("subject " + subject.id + ": negative inactive period");
  return std::visit(
      Overloaded{
          [&](const ObservedSignals&) -> double {
            const auto flag = subject.last_termination_flag();
            if (!flag) throw DataError("termination signals unavailable");
            return *flag ? 1.0 : 0.0;
          },
          [&](const LearnableExponential& m) -> double {
            return -std::expm1(-m.rate() * static_cast<double>(inactive_period));
          },
          [&](const FixedTimeout& m) -> double {
            return inactive_period > m.window ? 1.0 : 0.0;
          }},
      model);
}

double termination_probability(const Dataset& data, std::size_t index,
                               const TerminationModel& model) {
  return termination_probability(data[index], data.inactive_period(index), model);
}

std::vector<double> termination_probabilities(const Dataset& data,
                                              const TerminationModel& model) {
  std::vector<double> beta(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    beta[i] = termination_probability(data, i, model);
  }
  return beta;
}

std::vector<double> termination_log_rate_gradient(const Dataset& data,
                                                  const TerminationModel& model) {
  std::vector<double> grad(data.size(), 0.0);
  if (const auto* m = std::get_if<LearnableExponential>(&model)) {
    const double xi = m->rate();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double chi = static_cast<double>(data.inactive_period(i));
      // d/dlog_rate [1 - exp(-xi chi)] = xi chi exp(-xi chi)
      grad[i] = xi * chi * std::exp(-xi * chi);
    }
  }
  return grad;
}

double initial_log_rate(const Dataset& data) {
  std::vector<std::int64_t> chi;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (const auto c = data.inactive_period(i); c > 0) chi.push_back(c);
  }
  double median = 1.0;
  if (!chi.empty()) {
    const auto mid = chi.begin() + static_cast<std::ptrdiff_t>(chi.size() / 2);
    std::nth_element(chi.begin(), mid, chi.end());
    median = static_cast<double>(*mid);
  }
  return std::log(std::log(2.0) / median);
}

}  // namespace deepclife
