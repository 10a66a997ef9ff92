#pragma once

#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace maxnorm {

/// Flat "key = value" configuration with dotted section prefixes.
///
///   # comment
///   truth.d1 = 60
///   experiment.n_grid = 1500, 3000, 6000
///
/// Keys are unique; blank lines and lines starting with '#' are ignored.
/// Every key must be read by the consumer, so typos surface as errors via
/// check_all_used().
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = {}) const;
  double get_double(const std::string& key, const std::optional<double>& fallback = {}) const;
  long long get_int(const std::string& key, const std::optional<long long>& fallback = {}) const;
  bool get_bool(const std::string& key, const std::optional<bool>& fallback = {}) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void check_all_used() const;

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace maxnorm
