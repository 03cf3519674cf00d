#pragma once

#include <string>
#include <vector>

#include "subgm/diag.hpp"

namespace subgm {

/// Trajectory CSV schema. Header is exactly
///   t,loss,eta_t,err_op,err_fro,signal,cross,residual,f_term,g_term,
///   lambda_min_signal,eig_1..eig_r
/// with every numeric field printed at full round-trip precision.
std::vector<std::string> trajectory_columns(int r);
void write_trajectory_csv(const std::string& path, const std::vector<IterateRecord>& records, int r);

/// Parsed numeric CSV (any schema), used by the plotting command.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    int column_index(const std::string& name) const; // -1 when absent
};

CsvTable read_csv(const std::string& path);

std::string format_double(double v); // shortest round-trip decimal

} // namespace subgm
