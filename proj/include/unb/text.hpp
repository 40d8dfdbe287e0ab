#pragma once

#include <string>
#include <vector>

namespace unb {

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

/// Shortest round-trip decimal form of a double ("inf", "-inf", "nan" for
/// non-finite values).
std::string format_double(double v);
double parse_double(const std::string& s);

}  // namespace unb
