#include "subgm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace subgm {

namespace {

constexpr int kWidth = 760;
constexpr int kChartHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 46;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

std::string base_name(const std::string& path) {
    const std::size_t slash = path.find_last_of("/\\");
    std::string name = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const std::size_t dot = name.find_last_of('.');
    if (dot != std::string::npos) name = name.substr(0, dot);
    return name;
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points; // (t, value), value > 0
};

} // namespace

void write_metric_plot(const std::string& out_path, const std::vector<std::string>& csv_paths,
                       const std::vector<std::string>& metrics) {
    if (csv_paths.empty() || metrics.empty())
        throw std::invalid_argument("plot: need at least one CSV and one metric");

    std::vector<CsvTable> tables;
    for (const std::string& p : csv_paths) tables.push_back(read_csv(p));
    for (const CsvTable& t : tables) {
        if (t.column_index("t") < 0) throw std::runtime_error("plot: CSV lacks a 't' column");
        for (const std::string& m : metrics)
            if (t.column_index(m) < 0)
                throw std::runtime_error("plot: CSV lacks requested metric '" + m + "'");
    }

    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("plot: cannot write " + out_path);
    const int total_height = kMarginTop + static_cast<int>(metrics.size()) * kChartHeight;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << total_height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t mi = 0; mi < metrics.size(); ++mi) {
        const std::string& metric = metrics[mi];
        const double top = kMarginTop + static_cast<double>(mi) * kChartHeight;
        const double plot_h = kChartHeight - kMarginBottom - 24;
        const double plot_w = kWidth - kMarginLeft - kMarginRight;

        std::vector<Series> series;
        double tmin = 0.0, tmax = 1.0, vmin = 1e300, vmax = 0.0;
        bool any = false;
        for (std::size_t ti = 0; ti < tables.size(); ++ti) {
            const CsvTable& table = tables[ti];
            const int tc = table.column_index("t");
            const int vc = table.column_index(metric);
            Series s;
            s.label = base_name(csv_paths[ti]);
            for (const auto& row : table.rows) {
                const double v = row[vc];
                if (!(v > 0.0) || !std::isfinite(v)) continue; // log scale
                s.points.emplace_back(row[tc], v);
                tmax = std::max(tmax, row[tc]);
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
                any = true;
            }
            series.push_back(std::move(s));
        }
        if (!any) {
            vmin = 1e-1;
            vmax = 1.0;
        }
        if (vmin == vmax) vmax = vmin * 10.0;
        const double lmin = std::floor(std::log10(vmin));
        const double lmax = std::ceil(std::log10(vmax));

        auto sx = [&](double t) { return kMarginLeft + plot_w * (t - tmin) / std::max(1.0, tmax - tmin); };
        auto sy = [&](double v) {
            return top + plot_h - plot_h * (std::log10(v) - lmin) / std::max(1.0, lmax - lmin);
        };

        os << "<text x=\"" << kMarginLeft << "\" y=\"" << top - 10 << "\" font-weight=\"bold\">"
           << metric << "</text>\n";
        os << "<rect x=\"" << kMarginLeft << "\" y=\"" << top << "\" width=\"" << plot_w
           << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

        for (double dec = lmin; dec <= lmax; dec += 1.0) {
            const double y = sy(std::pow(10.0, dec));
            os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << y << "\" x2=\""
               << kMarginLeft + plot_w << "\" y2=\"" << y
               << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
            os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << y + 4
               << "\" text-anchor=\"end\">1e" << static_cast<int>(dec) << "</text>\n";
        }
        for (int k = 0; k <= 4; ++k) {
            const double t = tmin + (tmax - tmin) * k / 4.0;
            os << "<text x=\"" << sx(t) << "\" y=\"" << top + plot_h + 16
               << "\" text-anchor=\"middle\">" << static_cast<long>(t) << "</text>\n";
        }
        os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << top + plot_h + 34
           << "\" text-anchor=\"middle\">t</text>\n";

        for (std::size_t si = 0; si < series.size(); ++si) {
            const char* color = kPalette[si % (sizeof kPalette / sizeof kPalette[0])];
            if (!series[si].points.empty()) {
                os << "<polyline fill=\"none\" stroke=\"" << color
                   << "\" stroke-width=\"1.5\" points=\"";
                for (const auto& [t, v] : series[si].points) os << sx(t) << ',' << sy(v) << ' ';
                os << "\"/>\n";
            }
            const double ly = top + 14 + 14.0 * static_cast<double>(si);
            os << "<line x1=\"" << kMarginLeft + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
               << kMarginLeft + plot_w - 130 << "\" y2=\"" << ly << "\" stroke=\"" << color
               << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << kMarginLeft + plot_w - 124 << "\" y=\"" << ly + 4 << "\">"
               << series[si].label << "</text>\n";
        }
    }
    os << "</svg>\n";
}

} // namespace subgm
