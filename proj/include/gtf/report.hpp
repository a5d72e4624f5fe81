#pragma once

#include <string>
#include <vector>

#include "gtf/linalg.hpp"

namespace gtf {

// %.17g formatting used in every emitted number.
std::string fmt17(double v);

// RFC-4180 CSV: CRLF line endings, header row, 17-significant-digit floats.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<Vec> rows;
};

void write_csv(const std::string& path, const CsvTable& table);

// Running slope between consecutive (eps, value) points; first entry 0.
std::vector<double> running_slopes(const std::vector<double>& eps,
                                   const std::vector<double>& values);

// Standard experiment CSV with columns (epsilon, value, error, slope_running).
CsvTable experiment_table(const std::vector<double>& eps, const std::vector<double>& value,
                          const std::vector<double>& error);

} // namespace gtf
