// SPDX-License-Identifier: Apache-2.0
//
// Locale-independent number formatting shared by every text file the
// library writes. Doubles use the shortest representation that round-trips.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmrt::text {

std::string format_double(double v);
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Splits on runs of spaces/tabs; empty fields are dropped.
std::vector<std::string_view> split_ws(std::string_view line);
// Splits on a single delimiter; empty fields are kept.
std::vector<std::string_view> split(std::string_view line, char delim);
std::string_view trim(std::string_view s);

} // namespace mmrt::text
