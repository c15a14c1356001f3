#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace onr::csv {

// Splits one line on commas and trims surrounding whitespace from each field.
// No quoting support; the formats read here are purely numeric.
std::vector<std::string_view> split(std::string_view line);

std::optional<double> to_double(std::string_view field);

// Shortest round-trip decimal representation; locale-independent.
std::string format(double value);

}  // namespace onr::csv
