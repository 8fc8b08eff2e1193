#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace strbf {

struct LineSeries {
    std::string label;
    std::vector<double> y;
    std::string color;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<LineSeries> lines;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string render_line_chart(const ChartSpec& spec);

/// Re-renders train_curve.svg, test_curve.svg and predictions.svg from the
/// CSVs in `dir`. MSE curves are drawn in dB from the smoothed columns.
void render_plots(const std::filesystem::path& dir);

}  // namespace strbf
