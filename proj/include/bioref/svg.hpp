// Minimal SVG line plots for trajectory signals.
#pragma once

#include <string>
#include <vector>

namespace bioref {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
    std::string color = "#1f77b4";
};

struct PlotSpec {
    std::string title;
    std::string x_label = "t [s]";
    std::string y_label;
    int width = 800;
    int height = 400;
    std::size_t max_points = 4000;  // per series, after min/max decimation
};

std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_svg(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace bioref
