#include "deepclife/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "deepclife/error.hpp"

namespace deepclife {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string format_real(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

std::int64_t parse_integer(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  std::int64_t value = 0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw DataError(std::string(what) + ": expected an integer, got '" +
                    std::string(t) + "'");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view what) {
  const auto t = trim(text);
  std::string buf(t);
  char* end = nullptr;
  const double value = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
    throw DataError(std::string(what) + ": expected a finite real, got '" +
                    buf + "'");
  }
  return value;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto piece = line.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    fields.emplace_back(trim(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::int64_t SubjectRecord::observed_lifetime() const {
  return std::accumulate(inter_event_times.begin(), inter_event_times.end(),
                         std::int64_t{0});
}

std::int64_t SubjectRecord::event_count(std::int64_t t) const {
  const std::int64_t horizon = t - joining_time;
  std::int64_t elapsed = 0;
  std::int64_t count = 0;
  for (const auto gap : inter_event_times) {
    elapsed += gap;
    if (elapsed > horizon) break;
    ++count;
  }
  return count;
}

std::optional<bool> SubjectRecord::last_termination_flag() const {
  if (!termination_flags || termination_flags->empty()) return std::nullopt;
  return termination_flags->back() != 0;
}

void SubjectRecord::validate() const {
  if (joining_time < 0) {
    throw DataError("subject " + id + ": negative joining time");
  }
  for (const auto gap : inter_event_times) {
    if (gap < 0) throw DataError("subject " + id + ": negative inter-event time");
  }
  if (!event_covariates.empty() &&
      event_covariates.size() != inter_event_times.size()) {
    throw DataError("subject " + id +
                    ": event covariates do not match the number of events");
  }
  if (termination_flags) {
    const auto& flags = *termination_flags;
    if (flags.size() != inter_event_times.size()) {
      throw DataError("subject " + id +
                      ": termination flags do not match the number of events");
    }
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flags[i] > 1) throw DataError("subject " + id + ": flag must be 0/1");
      if (flags[i] == 1 && i + 1 != flags.size()) {
        throw DataError("subject " + id +
                        ": only the last event may carry a termination flag");
      }
    }
  }
  if (true_lifetime && *true_lifetime < 0) {
    throw DataError("subject " + id + ": negative true lifetime");
  }
  for (const double x : covariates) {
    if (!std::isfinite(x)) throw DataError("subject " + id + ": non-finite covariate");
  }
}

Dataset::Dataset(std::vector<SubjectRecord> subjects, std::int64_t t_m)
    : subjects_(std::move(subjects)), t_m_(t_m) {
  if (t_m_ < 0) throw DataError("measurement horizon t_m must be nonnegative");
  lifetimes_.reserve(subjects_.size());
  const std::size_t width = subjects_.empty() ? 0 : subjects_.front().covariates.size();
  for (const auto& s : subjects_) {
    s.validate();
    if (s.covariates.size() != width) {
      throw DataError("subject " + s.id + ": expected " + std::to_string(width) +
                      " covariates, got " + std::to_string(s.covariates.size()));
    }
    const auto h = s.observed_lifetime();
    if (s.joining_time + h > t_m_) {
      throw DataError("subject " + s.id +
                      ": joining time plus observed lifetime exceeds t_m");
    }
    lifetimes_.push_back(h);
    t_max_ = std::max(t_max_, h);
  }
}

std::int64_t Dataset::inactive_period(std::size_t i) const {
  return t_m_ - subjects_[i].joining_time - lifetimes_[i];
}

bool Dataset::has_termination_signals() const {
  return std::all_of(subjects_.begin(), subjects_.end(), [](const auto& s) {
    return s.last_termination_flag().has_value();
  });
}

std::size_t Dataset::covariate_count() const {
  return subjects_.empty() ? 0 : subjects_.front().covariates.size();
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SubjectRecord> picked;
  picked.reserve(indices.size());
  for (const auto i : indices) picked.push_back(subjects_.at(i));
  return Dataset(std::move(picked), t_m_);
}

Dataset read_dataset_csv(std::istream& in, std::int64_t t_m) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset CSV is empty");
  const auto header = split_csv_line(line);
  if (header.size() < 5 || header[0] != "id" || header[1] != "joining_time" ||
      header[2] != "inter_event_times" || header[3] != "termination_flag" ||
      header[4] != "true_lifetime") {
    throw DataError(
        "dataset CSV header must start with "
        "id,joining_time,inter_event_times,termination_flag,true_lifetime");
  }
  const std::size_t n_cov = header.size() - 5;

  std::vector<SubjectRecord> subjects;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string where = "line " + std::to_string(line_no);
    if (fields.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    SubjectRecord s;
    s.id = fields[0];
    s.joining_time = parse_integer(fields[1], where + " joining_time");
    if (!fields[2].empty()) {
      std::string_view rest = fields[2];
      while (true) {
        const auto semi = rest.find(';');
        s.inter_event_times.push_back(
            parse_integer(rest.substr(0, semi), where + " inter_event_times"));
        if (semi == std::string_view::npos) break;
        rest.remove_prefix(semi + 1);
      }
    }
    if (!fields[3].empty()) {
      const auto flag = parse_integer(fields[3], where + " termination_flag");
      if (flag != 0 && flag != 1) {
        throw DataError(where + ": termination_flag must be 0, 1 or empty");
      }
      if (s.inter_event_times.empty()) {
        throw DataError(where + ": termination_flag given for a subject without events");
      }
      std::vector<std::uint8_t> flags(s.inter_event_times.size(), 0);
      flags.back() = static_cast<std::uint8_t>(flag);
      s.termination_flags = std::move(flags);
    }
    if (!fields[4].empty()) {
      s.true_lifetime = parse_integer(fields[4], where + " true_lifetime");
    }
    s.covariates.reserve(n_cov);
    for (std::size_t c = 0; c < n_cov; ++c) {
      s.covariates.push_back(parse_real(fields[5 + c], where + " " + header[5 + c]));
    }
    subjects.push_back(std::move(s));
  }
  return Dataset(std::move(subjects), t_m);
}

Dataset read_dataset_csv(const std::string& path, std::int64_t t_m) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file " + path);
  return read_dataset_csv(in, t_m);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "id,joining_time,inter_event_times,termination_flag,true_lifetime";
  for (std::size_t c = 0; c < data.covariate_count(); ++c) out << ",cov_" << c;
  out << '\n';
  for (const auto& s : data.subjects()) {
    out << s.id << ',' << s.joining_time << ',';
    for (std::size_t i = 0; i < s.inter_event_times.size(); ++i) {
      if (i) out << ';';
      out << s.inter_event_times[i];
    }
    out << ',';
    if (const auto flag = s.last_termination_flag()) out << (*flag ? 1 : 0);
    out << ',';
    if (s.true_lifetime) out << *s.true_lifetime;
    for (const double x : s.covariates) out << ',' << format_real(x);
    out << '\n';
  }
}

void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file " + path);
  write_dataset_csv(out, data);
  if (!out) throw DataError("failed writing dataset file " + path);
}

}  // namespace deepclife
