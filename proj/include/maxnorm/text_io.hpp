#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace maxnorm::text {

std::string format_double(double x);  // shortest form that round-trips (%.17g)

std::vector<std::string> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

double parse_double(std::string_view token);
long long parse_int(std::string_view token);

// Next line that is neither blank nor a '#' comment; false at EOF.
bool next_content_line(std::istream& in, std::string& line);

std::vector<double> parse_double_row(std::string_view line, std::size_t expected);

}  // namespace maxnorm::text
