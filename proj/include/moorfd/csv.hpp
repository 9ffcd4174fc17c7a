#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace moorfd::csv {

/// Shortest decimal text that round-trips the double exactly.
std::string exact(double v);
/// Fixed number of significant digits (run records use 9).
std::string sig(double v, int digits);

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string trim(std::string_view s);
double to_double(std::string_view s);

/// Opens a file for writing, creating parent directories; throws ConfigError.
std::ofstream open_out(const std::filesystem::path& path);
/// Reads all non-empty lines; throws ConfigError when the file is missing.
std::vector<std::string> read_lines(const std::filesystem::path& path);

}  // namespace moorfd::csv
