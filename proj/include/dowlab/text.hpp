#pragma once

#include <string>
#include <vector>

namespace dowlab {

/// Renders a number with 6 significant digits ("%.6g"); the fixed format for
/// every number written to an output file, so reruns are byte-identical.
std::string fmt6(double value);

/// Full-precision rendering ("%.17g"); round-trips a double exactly.
std::string fmt_exact(double value);

std::string trim(const std::string& s);

std::vector<std::string> split(const std::string& s, char sep);

/// Reads a whole file; throws IoError if unreadable.
std::string read_file(const std::string& path);

/// Writes content atomically enough for our purposes (single write + close).
void write_file(const std::string& path, const std::string& content);

}  // namespace dowlab
