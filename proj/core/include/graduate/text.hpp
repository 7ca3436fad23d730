#pragma once

// Small string helpers shared by the CSV and config readers.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace graduate::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
/// Splits one CSV record; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::optional<int> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);
std::optional<bool> parse_bool(std::string_view s);
std::string lower(std::string_view s);
/// Shortest round-trippable decimal representation.
std::string format_double(double v);

}  // namespace graduate::text
