#include "subgm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subgm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> trajectory_columns(int r) {
    std::vector<std::string> cols = {"t",        "loss",   "eta_t",  "err_op",
                                     "err_fro",  "signal", "cross",  "residual",
                                     "f_term",   "g_term", "lambda_min_signal"};
    for (int i = 1; i <= r; ++i) cols.push_back("eig_" + std::to_string(i));
    return cols;
}

void write_trajectory_csv(const std::string& path, const std::vector<IterateRecord>& records,
                          int r) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    const std::vector<std::string> cols = trajectory_columns(r);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const IterateRecord& rec : records) {
        os << rec.t << ',' << format_double(rec.loss) << ',' << format_double(rec.eta_t) << ','
           << format_double(rec.err_op) << ',' << format_double(rec.err_fro) << ','
           << format_double(rec.signal) << ',' << format_double(rec.cross) << ','
           << format_double(rec.residual) << ',' << format_double(rec.f_term) << ','
           << format_double(rec.g_term) << ',' << format_double(rec.lambda_min_signal);
        for (int i = 0; i < r; ++i)
            os << ',' << format_double(i < static_cast<int>(rec.eig_signal.size())
                                           ? rec.eig_signal[i]
                                           : 0.0);
        os << '\n';
    }
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty CSV " + path);
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) table.columns.push_back(cell);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::vector<double> vals;
        while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.size() != table.columns.size())
            throw std::runtime_error("ragged CSV row in " + path);
        table.rows.push_back(std::move(vals));
    }
    return table;
}

} // namespace subgm
