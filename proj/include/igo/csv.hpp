#pragma once

#include <string>
#include <vector>

#include "igo/tensor.hpp"

namespace igo {

// Shortest representation that round-trips a double (17 significant digits).
std::string fmt_g17(double v);

std::string csv_join(const std::vector<std::string>& cells);
std::string csv_row(const std::vector<double>& values);

// Writes header plus one row per entry of `rows`.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace igo
