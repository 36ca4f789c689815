#pragma once

// Minimal numeric CSV reader shared by the gauge and data modules.

#include <string>
#include <vector>

namespace gaugeclust::detail {

struct NumericTable {
    std::vector<std::string> header;  // empty when the first row was numeric
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line per row
};

/// Reads a comma-separated file of numbers. A first row containing any
/// non-numeric cell is treated as a header. Blank lines are skipped. Throws
/// std::runtime_error naming the file and line on malformed input, ragged rows
/// or an empty file.
NumericTable read_numeric_csv(const std::string& path);

bool parse_double(const std::string& cell, double& out);

}  // namespace gaugeclust::detail
