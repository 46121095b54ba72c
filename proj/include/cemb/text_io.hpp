#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace cemb {

std::string read_file(const std::filesystem::path& path);

/// Splits a file into lines on '\n', stripping a trailing '\r' per line.
/// A trailing newline does not produce an extra empty line.
std::vector<std::string> read_lines(const std::filesystem::path& path);

/// Writes content through a temp file in the same directory plus rename,
/// so a failed run never leaves a partial output behind.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Decimal text with 9 significant digits ("%.9g").
std::string format_component(double v);

/// Fixed 6 decimal places ("%.6f"), the run-file score format.
std::string format_score(double v);

std::vector<std::string> split_whitespace(const std::string& line);
std::vector<std::string> split_tabs(const std::string& line);

/// Locale-independent strict parses; return false on trailing garbage.
bool parse_double(const std::string& field, double& out);
bool parse_int(const std::string& field, long long& out);

}  // namespace cemb
