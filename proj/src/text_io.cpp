#include "maxnorm/text_io.hpp"

#include "maxnorm/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace maxnorm::text {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token) {
  const std::string s(trim(token));
  if (s.empty()) throw InvalidInput("expected a number, got an empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw InvalidInput("not a finite number: '" + s + "'");
  }
  return v;
}

long long parse_int(std::string_view token) {
  const std::string s(trim(token));
  if (s.empty()) throw InvalidInput("expected an integer, got an empty field");
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) {
    throw InvalidInput("not an integer: '" + s + "'");
  }
  return v;
}

bool next_content_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    return true;
  }
  return false;
}

std::vector<double> parse_double_row(std::string_view line, std::size_t expected) {
  const auto fields = split(line, ',');
  if (fields.size() != expected) {
    throw InvalidInput("expected " + std::to_string(expected) + " values, found " +
                       std::to_string(fields.size()));
  }
  std::vector<double> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(parse_double(f));
  return out;
}

}  // namespace maxnorm::text
