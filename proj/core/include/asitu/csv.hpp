#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace asitu {

/// Parsed numeric CSV: a mandatory header row followed by double-valued rows.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

// Comma separated, '.' decimal point, one header row. Cells that fail to
// parse as doubles are reported with their 1-based row number.
CsvTable read_numeric_csv(const std::filesystem::path& path);

std::vector<std::string> split_csv_line(const std::string& line);

// Fixed-format float for byte-stable artifacts ("%.9g").
std::string format_double(double v);

}  // namespace asitu
