#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace beatscope::detail {

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// Parses LF-separated `key=value` lines. Blank lines and lines starting with
/// '#' are skipped. Unknown or duplicate keys throw InvalidArgument.
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::vector<std::string>& known);

double parse_double(std::string_view s);
std::size_t parse_count(std::string_view s);
std::vector<double> parse_double_list(std::string_view s, char sep = ',');

/// Comma-separated rows, skipping blank and '#' lines.
std::vector<std::vector<std::string>> read_csv_rows(std::string_view text);

}  // namespace beatscope::detail
