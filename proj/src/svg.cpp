#include "swarmcast/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swarmcast/io.hpp"

namespace swarmcast {

namespace {

constexpr int kCanvas = 560;
constexpr int kPlotMargin = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  // Two decimals are plenty for pixel coordinates and keep files small.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string render_snapshot_svg(const Frame& frame, const Codebook& codebook,
                                const ClusterConfig& clusters, const std::string& title) {
  const double size = static_cast<double>(kCanvas);
  auto px = [size](double x) { return x * size; };
  auto py = [size](double y) { return (1.0 - y) * size; };  // y grows upward

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kCanvas << "\" height=\""
      << kCanvas + 24 << "\" viewBox=\"0 0 " << kCanvas << ' ' << kCanvas + 24 << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kCanvas << "\" height=\"" << kCanvas
      << "\" fill=\"#fcfcfc\" stroke=\"#444\"/>\n";
  out << "<text x=\"8\" y=\"" << kCanvas + 17 << "\" font-family=\"sans-serif\" font-size=\"13\">"
      << title << "</text>\n";

  for (const Cluster& c : clusters.clusters) {
    out << "<circle cx=\"" << fmt(px(c.centroid.x)) << "\" cy=\"" << fmt(py(c.centroid.y))
        << "\" r=\"" << fmt(c.radius * size)
        << "\" fill=\"#1f77b4\" fill-opacity=\"0.12\" stroke=\"#1f77b4\"/>\n";
  }
  for (const Vec2& w : codebook.weights) {
    const double x = px(w.x);
    const double y = py(w.y);
    out << "<path d=\"M " << fmt(x - 3) << ' ' << fmt(y) << " H " << fmt(x + 3) << " M "
        << fmt(x) << ' ' << fmt(y - 3) << " V " << fmt(y + 3)
        << "\" stroke=\"#999\" stroke-width=\"1\"/>\n";
  }
  for (const Vec2& a : frame.agents) {
    out << "<circle cx=\"" << fmt(px(a.x)) << "\" cy=\"" << fmt(py(a.y))
        << "\" r=\"2\" fill=\"#d62728\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string render_lines_svg(const std::vector<Series>& series, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             bool log_y) {
  double y_min = std::numeric_limits<double>::infinity();
  double y_max = -std::numeric_limits<double>::infinity();
  std::size_t n_max = 0;
  for (const Series& s : series) {
    n_max = std::max(n_max, s.y.size());
    for (double v : s.y) {
      const double t = log_y ? std::log10(std::max(v, 1e-12)) : v;
      y_min = std::min(y_min, t);
      y_max = std::max(y_max, t);
    }
  }
  if (n_max == 0 || !std::isfinite(y_min)) {
    y_min = 0.0;
    y_max = 1.0;
  }
  if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

  const double w = kCanvas;
  const double h = kCanvas * 0.62;
  const double x0 = kPlotMargin;
  const double y0 = h - kPlotMargin;
  const double plot_w = w - 2 * kPlotMargin;
  const double plot_h = h - 2 * kPlotMargin;

  auto sx = [&](double i) {
    return x0 + (n_max > 1 ? i / static_cast<double>(n_max - 1) : 0.5) * plot_w;
  };
  auto sy = [&](double v) {
    const double t = log_y ? std::log10(std::max(v, 1e-12)) : v;
    return y0 - (t - y_min) / (y_max - y_min) * plot_h;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#ffffff\"/>\n";
  out << "<text x=\"" << fmt(w / 2 - 40) << "\" y=\"18\" font-family=\"sans-serif\" "
      << "font-size=\"13\">" << title << "</text>\n";
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0 + plot_w)
      << "\" y2=\"" << fmt(y0) << "\" stroke=\"#222\"/>\n";
  out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0)
      << "\" y2=\"" << fmt(y0 - plot_h) << "\" stroke=\"#222\"/>\n";
  out << "<text x=\"" << fmt(x0 + plot_w / 2 - 20) << "\" y=\"" << fmt(h - 8)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << x_label << "</text>\n";
  out << "<text x=\"10\" y=\"" << fmt(y0 - plot_h - 8)
      << "\" font-family=\"sans-serif\" font-size=\"11\">" << y_label
      << (log_y ? " (log10)" : "") << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    if (s.y.empty()) continue;
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      if (i > 0) out << ' ';
      out << fmt(sx(static_cast<double>(i))) << ',' << fmt(sy(s.y[i]));
    }
    out << "\"/>\n";
    out << "<text x=\"" << fmt(x0 + plot_w + 4) << "\" y=\""
        << fmt(20.0 + 14.0 * static_cast<double>(si)) << "\" font-family=\"sans-serif\" "
        << "font-size=\"10\" fill=\"" << color << "\">" << s.label << "</text>\n";
  }
  out << "<text x=\"" << fmt(x0 - 44) << "\" y=\"" << fmt(y0)
      << "\" font-family=\"sans-serif\" font-size=\"9\">" << format_double(log_y ? std::pow(10.0, y_min) : y_min)
      << "</text>\n";
  out << "<text x=\"" << fmt(x0 - 44) << "\" y=\"" << fmt(y0 - plot_h + 4)
      << "\" font-family=\"sans-serif\" font-size=\"9\">" << format_double(log_y ? std::pow(10.0, y_max) : y_max)
      << "</text>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace swarmcast
