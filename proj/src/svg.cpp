#include "qdreach/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qdreach {
namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 50.0, kBottom = 55.0;
constexpr int kTicks = 5;

// Pixel coordinates rounded to 1/100 px; value labels to four significant
// digits. Both go through snprintf with fixed formats, so output bytes depend
// only on the numbers themselves.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_scatter(std::string label, std::string color,
                          std::vector<std::pair<double, double>> points) {
  series_.push_back({std::move(label), std::move(color), std::move(points), false});
}

void SvgPlot::add_line(std::string label, std::string color,
                       std::vector<std::pair<double, double>> points) {
  series_.push_back({std::move(label), std::move(color), std::move(points), true});
}

void SvgPlot::set_x_range(double lo, double hi) {
  has_x_range_ = true;
  x_lo_ = lo;
  x_hi_ = hi;
}

void SvgPlot::set_y_range(double lo, double hi) {
  has_y_range_ = true;
  y_lo_ = lo;
  y_hi_ = hi;
}

std::string SvgPlot::render() const {
  double x_lo = x_lo_, x_hi = x_hi_, y_lo = y_lo_, y_hi = y_hi_;
  if (!has_x_range_ || !has_y_range_) {
    double dx_lo = std::numeric_limits<double>::infinity(), dx_hi = -dx_lo;
    double dy_lo = dx_lo, dy_hi = -dx_lo;
    for (const auto& s : series_)
      for (const auto& [x, y] : s.points) {
        dx_lo = std::min(dx_lo, x);
        dx_hi = std::max(dx_hi, x);
        dy_lo = std::min(dy_lo, y);
        dy_hi = std::max(dy_hi, y);
      }
    if (dx_lo > dx_hi) {  // no points at all
      dx_lo = dy_lo = 0.0;
      dx_hi = dy_hi = 1.0;
    }
    if (!has_x_range_) {
      x_lo = dx_lo;
      x_hi = dx_hi;
    }
    if (!has_y_range_) {
      y_lo = dy_lo;
      y_hi = dy_hi;
    }
  }
  if (x_hi <= x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi <= y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto map_x = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto map_y = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << px(kWidth)
      << "\" height=\"" << px(kHeight) << "\" viewBox=\"0 0 " << px(kWidth) << ' ' << px(kHeight)
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << px(kWidth) << "\" height=\"" << px(kHeight)
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << px(kWidth / 2) << "\" y=\"28\" font-family=\"sans-serif\" "
      << "font-size=\"16\" text-anchor=\"middle\">" << escape(title_) << "</text>\n";

  // Axes, ticks, grid.
  out << "<g stroke=\"#888\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop + plot_h) << "\" x2=\""
      << px(kLeft + plot_w) << "\" y2=\"" << px(kTop + plot_h) << "\"/>\n";
  out << "<line x1=\"" << px(kLeft) << "\" y1=\"" << px(kTop) << "\" x2=\"" << px(kLeft)
      << "\" y2=\"" << px(kTop + plot_h) << "\"/>\n";
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / kTicks;
    const double fy = y_lo + (y_hi - y_lo) * i / kTicks;
    const double tx = map_x(fx), ty = map_y(fy);
    out << "<line x1=\"" << px(tx) << "\" y1=\"" << px(kTop + plot_h) << "\" x2=\"" << px(tx)
        << "\" y2=\"" << px(kTop + plot_h + 5) << "\"/>\n";
    out << "<text x=\"" << px(tx) << "\" y=\"" << px(kTop + plot_h + 18)
        << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">" << tick_label(fx)
        << "</text>\n";
    out << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(ty) << "\" x2=\"" << px(kLeft)
        << "\" y2=\"" << px(ty) << "\"/>\n";
    out << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(ty + 4)
        << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << tick_label(fy)
        << "</text>\n";
  }
  out << "</g>\n";
  out << "<text x=\"" << px(kLeft + plot_w / 2) << "\" y=\"" << px(kHeight - 12)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">"
      << escape(x_label_) << "</text>\n";
  out << "<text x=\"18\" y=\"" << px(kTop + plot_h / 2)
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18 " << px(kTop + plot_h / 2) << ")\">" << escape(y_label_)
      << "</text>\n";

  for (const auto& s : series_) {
    if (s.line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      bool first = true;
      for (const auto& [x, y] : s.points) {
        if (!first) out << ' ';
        first = false;
        out << px(map_x(x)) << ',' << px(map_y(y));
      }
      out << "\"/>\n";
    } else {
      out << "<g fill=\"" << s.color << "\" fill-opacity=\"0.6\">\n";
      for (const auto& [x, y] : s.points)
        out << "<circle cx=\"" << px(map_x(x)) << "\" cy=\"" << px(map_y(y)) << "\" r=\"2.5\"/>\n";
      out << "</g>\n";
    }
  }

  // Legend in the top-right plot corner.
  double ly = kTop + 14.0;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    out << "<rect x=\"" << px(kLeft + plot_w - 150) << "\" y=\"" << px(ly - 9)
        << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n";
    out << "<text x=\"" << px(kLeft + plot_w - 135) << "\" y=\"" << px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n";
    ly += 16.0;
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace qdreach
