#ifndef DEEPCLIFE_CONFIG_HPP_
#define DEEPCLIFE_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace deepclife {

/// Flat `key = value` configuration. Lines starting with `#` and text after
/// an unquoted `#` are comments. Later assignments override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, std::string value);
  bool contains(const std::string& key) const;
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  double get_real(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Entries of `other` override entries of this config.
  void merge(const KeyValueConfig& other);

  /// Keys in sorted order, one `key = value` line each.
  void write(std::ostream& out) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Keys not listed in `known`.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace deepclife

#endif  // DEEPCLIFE_CONFIG_HPP_
