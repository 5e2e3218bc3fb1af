#pragma once

#include <string>
#include <vector>

namespace sidyn {

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  std::string label;
};

struct SvgAxes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
};

/// Minimal polyline plot; nonpositive values are dropped on log axes.
void write_svg_plot(const std::string& path, const SvgAxes& axes,
                    const std::vector<SvgSeries>& series);

}  // namespace sidyn
