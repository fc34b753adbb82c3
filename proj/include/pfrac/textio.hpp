// Small text helpers shared by the file formats.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace pfrac {

/// Shortest representation that parses back to the identical double.
std::string format_double(double value);

/// Strict full-string parse; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);
bool parse_int(std::string_view text, long long& out);

std::string_view trim(std::string_view s);

/// Writes to `<path>.tmp.<pid>` and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace pfrac
