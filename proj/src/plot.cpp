#include "alignlab/plot.hpp"

#include "alignlab/errors.hpp"
#include "alignlab/results.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace alignlab {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kMarginLeft = 60.0, kMarginRight = 20.0;
constexpr double kMarginTop = 40.0, kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    if (series.empty()) throw InvalidInput("write_svg_plot: no series");
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw InvalidInput("write_svg_plot: malformed series '" + s.label + "'");
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    double plot_w = kWidth - kMarginLeft - kMarginRight;
    double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) {
        return kHeight - kMarginBottom - (y - ymin) / (ymax - ymin) * plot_h;
    };

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
       << "\">\n";
    os << "<metadata>{\"xmin\":" << fmt(xmin) << ",\"xmax\":" << fmt(xmax)
       << ",\"ymin\":" << fmt(ymin) << ",\"ymax\":" << fmt(ymax)
       << ",\"left\":" << fmt(kMarginLeft) << ",\"right\":" << fmt(kMarginRight)
       << ",\"top\":" << fmt(kMarginTop) << ",\"bottom\":" << fmt(kMarginBottom)
       << ",\"width\":" << fmt(kWidth) << ",\"height\":" << fmt(kHeight)
       << "}</metadata>\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

    // Axes.
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom
       << "\" x2=\"" << kWidth - kMarginRight << "\" y2=\""
       << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
       << kMarginLeft << "\" y2=\"" << kHeight - kMarginBottom
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
       << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << y_label
       << "</text>\n";
    // Range labels.
    os << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - kMarginBottom + 16
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << xmin << "</text>\n";
    os << "<text x=\"" << kWidth - kMarginRight << "\" y=\""
       << kHeight - kMarginBottom + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << xmax
       << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 4 << "\" y=\"" << kHeight - kMarginBottom
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << ymin
       << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 4 << "\" y=\"" << kMarginTop + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << ymax
       << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\""
           << kPalette[s % (sizeof kPalette / sizeof kPalette[0])]
           << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (i) os << " ";
            os << fmt(px(series[s].x[i])) << "," << fmt(py(series[s].y[i]));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
    write_text_file(path, os.str());
}

std::vector<std::pair<double, double>>
read_svg_series(const std::filesystem::path& path, std::size_t series_index) {
    std::string text = read_text_file(path);

    auto grab = [&](const std::string& key) {
        std::string needle = "\"" + key + "\":";
        std::size_t at = text.find(needle);
        if (at == std::string::npos)
            throw IoError("missing metadata key " + key, path.string());
        return std::strtod(text.c_str() + at + needle.size(), nullptr);
    };
    double xmin = grab("xmin"), xmax = grab("xmax");
    double ymin = grab("ymin"), ymax = grab("ymax");
    double left = grab("left"), right = grab("right");
    double top = grab("top"), bottom = grab("bottom");
    double width = grab("width"), height = grab("height");
    double plot_w = width - left - right;
    double plot_h = height - top - bottom;

    std::size_t at = 0;
    for (std::size_t s = 0; s <= series_index; ++s) {
        at = text.find("points=\"", at);
        if (at == std::string::npos)
            throw IoError("polyline not found", path.string());
        at += 8;
    }
    std::size_t end = text.find('"', at);
    std::istringstream pts(text.substr(at, end - at));
    std::vector<std::pair<double, double>> out;
    std::string pair;
    while (pts >> pair) {
        std::size_t comma = pair.find(',');
        double px = std::strtod(pair.substr(0, comma).c_str(), nullptr);
        double py = std::strtod(pair.substr(comma + 1).c_str(), nullptr);
        double x = xmin + (px - left) / plot_w * (xmax - xmin);
        double y = ymin + (height - bottom - py) / plot_h * (ymax - ymin);
        out.emplace_back(x, y);
    }
    return out;
}

} // namespace alignlab
