#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irispad::text {

std::string_view trim(std::string_view s);

/// Splits on `delim`. When `max_fields` is nonzero the last field keeps any
/// remaining delimiters.
std::vector<std::string_view> split(std::string_view s, char delim,
                                    std::size_t max_fields = 0);

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

/// Whole file as a string; throws Error(Io).
std::string read_file(const std::filesystem::path& path);

void write_file(const std::filesystem::path& path, std::string_view content);

/// Lines without terminators (handles CRLF).
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// True for blank lines and lines whose first non-space char is '#'.
bool is_skippable(std::string_view line);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Fixed-point with `digits` decimals.
std::string format_fixed(double v, int digits);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

}  // namespace irispad::text
