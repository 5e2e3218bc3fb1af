#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace sidyn {

namespace {

constexpr double W = 720, H = 480;
constexpr double ML = 70, MR = 20, MT = 40, MB = 55;

std::string fmt_tick(double v) {
  std::ostringstream os;
  if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-2))
    os << std::scientific;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

void write_svg_plot(const std::string& path, const SvgAxes& axes,
                    const std::vector<SvgSeries>& series) {
  // Collect transformed points and the data range.
  auto txf = [&](double v, bool lg) { return lg ? std::log10(v) : v; };
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  std::vector<std::vector<std::pair<double, double>>> pts(series.size());
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if ((axes.logx && !(sr.x[i] > 0.0)) || (axes.logy && !(sr.y[i] > 0.0)))
        continue;
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      const double px = txf(sr.x[i], axes.logx), py = txf(sr.y[i], axes.logy);
      pts[s].emplace_back(px, py);
      xmin = std::min(xmin, px);
      xmax = std::max(xmax, px);
      ymin = std::min(ymin, py);
      ymax = std::max(ymax, py);
    }
  }
  if (!(xmin <= xmax)) {  // nothing plottable
    xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto sx = [&](double x) {
    return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR);
  };
  auto sy = [&](double y) {
    return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << axes.title
      << "</text>\n";

  // frame + ticks
  out << "<rect x=\"" << ML << "\" y=\"" << MT << "\" width=\"" << W - ML - MR
      << "\" height=\"" << H - MT - MB
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const int nticks = 5;
  for (int i = 0; i <= nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / nticks;
    const double fy = ymin + (ymax - ymin) * i / nticks;
    const double vx = axes.logx ? std::pow(10.0, fx) : fx;
    const double vy = axes.logy ? std::pow(10.0, fy) : fy;
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << H - MB << "\" x2=\""
        << sx(fx) << "\" y2=\"" << H - MB + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << H - MB + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt_tick(vx) << "</text>\n";
    out << "<line x1=\"" << ML - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ML
        << "\" y2=\"" << sy(fy) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << ML - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << fmt_tick(vy) << "</text>\n";
  }
  out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << axes.xlabel << "</text>\n";
  out << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 16 "
      << (MT + H - MB) / 2 << ")\">" << axes.ylabel << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    if (pts[s].empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"" << series[s].color
        << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [px, py] : pts[s]) out << sx(px) << "," << sy(py) << " ";
    out << "\"/>\n";
    if (!series[s].label.empty()) {
      const double ly = MT + 16 + 16 * static_cast<double>(s);
      out << "<line x1=\"" << W - MR - 120 << "\" y1=\"" << ly << "\" x2=\""
          << W - MR - 95 << "\" y2=\"" << ly << "\" stroke=\""
          << series[s].color << "\" stroke-width=\"2\"/>\n";
      out << "<text x=\"" << W - MR - 90 << "\" y=\"" << ly + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\">"
          << series[s].label << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace sidyn
