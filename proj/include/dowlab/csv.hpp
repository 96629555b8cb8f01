#pragma once

#include <string>
#include <vector>

namespace dowlab {

/// Splits one CSV line. Handles double-quoted fields (embedded commas and
/// doubled quotes); no multi-line fields, which the data files never contain.
std::vector<std::string> split_csv_line(const std::string& line);

/// Reads a CSV file into rows of fields. Skips a trailing empty line.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

}  // namespace dowlab
