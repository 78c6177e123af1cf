#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qdreach {

// Minimal deterministic SVG 1.1 chart writer. Identical inputs produce
// byte-identical documents: no timestamps, no locale-dependent formatting,
// fixed canvas geometry.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string x_label, std::string y_label);

  void add_scatter(std::string label, std::string color,
                   std::vector<std::pair<double, double>> points);
  void add_line(std::string label, std::string color,
                std::vector<std::pair<double, double>> points);

  // Overrides the data-driven axis ranges.
  void set_x_range(double lo, double hi);
  void set_y_range(double lo, double hi);

  std::string render() const;

 private:
  struct Series {
    std::string label;
    std::string color;
    std::vector<std::pair<double, double>> points;
    bool line = false;
  };

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool has_x_range_ = false, has_y_range_ = false;
  double x_lo_ = 0.0, x_hi_ = 1.0, y_lo_ = 0.0, y_hi_ = 1.0;
};

}  // namespace qdreach
