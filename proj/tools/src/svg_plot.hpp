#pragma once

#include <string>
#include <vector>

namespace gsdsce::cli {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<PlotSeries> series;
};

/// Static line chart. Non-finite points are skipped; on a log axis so are
/// non-positive ones.
std::string render_svg(const PlotSpec& spec);

}  // namespace gsdsce::cli
