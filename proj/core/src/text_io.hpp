#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

// File helpers shared by the readers and writers in this library.
namespace cdisc::detail {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// Splits on '\n', dropping a trailing '\r' from each line. A final empty
// line after the last '\n' is not reported.
std::vector<std::string_view> split_lines(std::string_view text);

std::vector<std::string_view> split_whitespace(std::string_view text);

std::string_view trim(std::string_view text);

// Shortest representation with 9 significant digits, as used by the vector
// text format.
std::string format_g9(double value);

double parse_double(std::string_view text);

// Non-negative decimal integer; throws Errc::parse.
std::size_t parse_size(std::string_view text);

}  // namespace cdisc::detail
