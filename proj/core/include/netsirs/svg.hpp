#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace netsirs {

/// One polyline for the minimal SVG line plotter.
struct SvgSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Self-contained line plot: axes, tick labels, legend, one polyline per
/// series. CSV stays the canonical output; this is a convenience rendering
/// with deterministic bytes for fixed input.
void write_line_plot(std::ostream& out, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

} // namespace netsirs
