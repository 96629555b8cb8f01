#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace dowlab::svg {

/// Linear map from a data interval onto a pixel interval (either direction).
struct LinScale {
  double lo = 0;
  double hi = 1;
  double a = 0;
  double b = 1;

  double operator()(double v) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

/// Round tick positions covering [lo, hi] with a 1-2-5 step.
std::vector<double> nice_ticks(double lo, double hi, int target_count);

std::string escape_text(const std::string& s);

/// Accumulates SVG elements; every coordinate is written with fmt6 so the
/// same inputs always produce the same bytes.
class Canvas {
 public:
  Canvas(double width, double height);

  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width = 1.5);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& content, double size = 11,
            const std::string& anchor = "start", const std::string& fill = "#202020",
            bool bold = false);

  std::string finish() const;

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_;
  double height_;
  std::ostringstream body_;
};

}  // namespace dowlab::svg
