#pragma once

#include <string>
#include <vector>

#include "subgm/csv.hpp"

namespace subgm {

/// One self-contained SVG file with a log-scale-y line chart per metric, one
/// series per input CSV (keyed on the `t` column). All inputs must share the
/// trajectory schema for the requested metrics.
void write_metric_plot(const std::string& out_path, const std::vector<std::string>& csv_paths,
                       const std::vector<std::string>& metrics);

} // namespace subgm
