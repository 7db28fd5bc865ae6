#include "ldslab/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace ldslab {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b",
                                              "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<Curve>& curves,
                       const PlotOptions& opt) {
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double w = opt.width - left - right;
  const double h = opt.height - top - bottom;

  auto ty = [&](double y) { return opt.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!opt.log_y || y > 0.0);
  };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < std::min(c.x.size(), c.y.size()); ++i) {
      if (!usable(c.x[i], c.y[i])) continue;
      x0 = std::min(x0, c.x[i]);
      x1 = std::max(x1, c.x[i]);
      y0 = std::min(y0, ty(c.y[i]));
      y1 = std::max(y1, ty(c.y[i]));
    }
  }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 <= 0) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 <= 0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto sy = [&](double y) { return top + (1.0 - (ty(y) - y0) / (y1 - y0)) * h; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width
      << "\" height=\"" << opt.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << opt.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(opt.title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w
      << "\" height=\"" << h << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int k = 0; k <= 5; ++k) {
    const double xv = x0 + (x1 - x0) * k / 5.0;
    const double X = sx(xv);
    out << "<line x1=\"" << px(X) << "\" y1=\"" << top + h << "\" x2=\"" << px(X)
        << "\" y2=\"" << top + h + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << px(X) << "\" y=\"" << top + h + 18
        << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
    const double yt = y0 + (y1 - y0) * k / 5.0;
    const double Y = top + (1.0 - k / 5.0) * h;
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << px(Y) << "\" x2=\"" << left
        << "\" y2=\"" << px(Y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << px(Y + 4)
        << "\" text-anchor=\"end\">" << fmt(opt.log_y ? std::pow(10.0, yt) : yt)
        << "</text>\n";
  }
  out << "<text x=\"" << px(left + w / 2) << "\" y=\"" << opt.height - 10
      << "\" text-anchor=\"middle\">" << escape(opt.x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << px(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << px(top + h / 2) << ")\">" << escape(opt.y_label)
      << (opt.log_y ? " (log)" : "") << "</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % kPalette.size()];
    const auto& cv = curves[c];
    std::ostringstream pts;
    for (std::size_t i = 0; i < std::min(cv.x.size(), cv.y.size()); ++i) {
      if (!usable(cv.x[i], cv.y[i])) continue;
      pts << px(sx(cv.x[i])) << ',' << px(sy(cv.y[i])) << ' ';
      out << "<circle cx=\"" << px(sx(cv.x[i])) << "\" cy=\"" << px(sy(cv.y[i]))
          << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
        << pts.str() << "\"/>\n";
    const double ly = top + 16 + 16 * static_cast<double>(c);
    out << "<line x1=\"" << left + 10 << "\" y1=\"" << px(ly - 4) << "\" x2=\""
        << left + 30 << "\" y2=\"" << px(ly - 4) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + 36 << "\" y=\"" << px(ly) << "\">"
        << escape(cv.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ldslab
