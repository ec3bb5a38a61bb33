#include "igo/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "igo/errors.hpp"

namespace igo {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string csv_join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out += ',';
        out += cells[i];
    }
    return out;
}

std::string csv_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt_g17(v));
    return csv_join(cells);
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    os << header << "\n";
    for (const std::string& r : rows) os << r << "\n";
    if (!os) throw IoError("write failed for '" + path + "'");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    CsvTable table;
    std::string line;
    // Leading comment lines carry metadata; the header is the first plain line.
    do {
        if (!std::getline(is, line)) throw IoError("'" + path + "' is empty");
    } while (!line.empty() && line[0] == '#');
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) table.header.push_back(cell);
    }
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError("'" + path + "' line " + std::to_string(line_no) +
                              ": bad number '" + cell + "'");
            }
        }
        if (row.size() != table.header.size()) {
            throw IoError("'" + path + "' line " + std::to_string(line_no) +
                          ": expected " + std::to_string(table.header.size()) +
                          " cells, got " + std::to_string(row.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace igo
