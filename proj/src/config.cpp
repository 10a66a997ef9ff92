#include "maxnorm/config.hpp"

#include "maxnorm/errors.hpp"
#include "maxnorm/text_io.hpp"

#include <fstream>

namespace maxnorm {

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key(text::trim(t.substr(0, eq)));
    const std::string value(text::trim(t.substr(eq + 1)));
    if (key.empty()) throw InvalidInput("config line " + std::to_string(lineno) + ": empty key");
    if (!cfg.values_.emplace(key, value).second) {
      throw InvalidInput("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config: " + path);
  return parse(in);
}

const std::string* Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key,
                               const std::optional<std::string>& fallback) const {
  if (const auto* v = find(key)) return *v;
  if (fallback) return *fallback;
  throw InvalidInput("config: missing required key '" + key + "'");
}

double Config::get_double(const std::string& key, const std::optional<double>& fallback) const {
  if (const auto* v = find(key)) {
    try {
      return text::parse_double(*v);
    } catch (const InvalidInput& e) {
      throw InvalidInput("config key '" + key + "': " + e.what());
    }
  }
  if (fallback) return *fallback;
  throw InvalidInput("config: missing required key '" + key + "'");
}

long long Config::get_int(const std::string& key, const std::optional<long long>& fallback) const {
  if (const auto* v = find(key)) {
    try {
      return text::parse_int(*v);
    } catch (const InvalidInput& e) {
      throw InvalidInput("config key '" + key + "': " + e.what());
    }
  }
  if (fallback) return *fallback;
  throw InvalidInput("config: missing required key '" + key + "'");
}

bool Config::get_bool(const std::string& key, const std::optional<bool>& fallback) const {
  if (const auto* v = find(key)) {
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw InvalidInput("config key '" + key + "': expected true or false");
  }
  if (fallback) return *fallback;
  throw InvalidInput("config: missing required key '" + key + "'");
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<double> out;
  for (const auto& f : text::split(raw, ',')) out.push_back(text::parse_double(f));
  return out;
}

std::vector<long long> Config::get_int_list(const std::string& key) const {
  const std::string raw = get_string(key);
  std::vector<long long> out;
  for (const auto& f : text::split(raw, ',')) out.push_back(text::parse_int(f));
  return out;
}

void Config::check_all_used() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) throw InvalidInput("config: unknown key '" + key + "'");
  }
}

}  // namespace maxnorm
