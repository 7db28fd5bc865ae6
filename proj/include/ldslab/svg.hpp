#pragma once

#include <string>
#include <vector>

namespace ldslab {

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Self-contained SVG line plot: axes with ticks, one polyline with markers
/// per curve, legend in the upper left. Non-positive values are dropped on a
/// log axis.
std::string render_svg(const std::vector<Curve>& curves,
                       const PlotOptions& options);

}  // namespace ldslab
