#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace alignlab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal static SVG line plot. The data-to-pixel mapping is linear and the
// axis ranges are embedded in a <metadata> block so emitted coordinates can
// be mapped back to data values.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

// Reads back the first polyline of an emitted plot as data coordinates.
std::vector<std::pair<double, double>>
read_svg_series(const std::filesystem::path& path, std::size_t series_index = 0);

} // namespace alignlab
