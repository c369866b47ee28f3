#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cliquewatch {

// Shortest decimal representation that round-trips to the same double.
// Output files go through this so reruns are byte-identical.
std::string format_double(double value);

std::vector<std::string> split_csv_line(std::string_view line);

double parse_double(std::string_view text);
long long parse_int(std::string_view text);

std::string trim(std::string_view text);

}  // namespace cliquewatch
