#include "dowlab/svg.hpp"

#include <cmath>

#include "dowlab/text.hpp"

namespace dowlab::svg {

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
  if (target_count < 1) target_count = 1;
  if (lo > hi) std::swap(lo, hi);
  if (lo == hi) {
    double pad = lo == 0 ? 0.5 : std::abs(lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  double raw = (hi - lo) / target_count;
  double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double norm = raw / mag;
  double step;
  if (norm <= 1)
    step = mag;
  else if (norm <= 2)
    step = 2 * mag;
  else if (norm <= 5)
    step = 5 * mag;
  else
    step = 10 * mag;

  std::vector<double> ticks;
  double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + step * 1e-9; t += step) {
    // Snap values that are zero up to rounding, so "-0" never appears.
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  }
  return ticks;
}

std::string escape_text(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  const std::string& stroke) {
  body_ << "<rect x=\"" << fmt6(x) << "\" y=\"" << fmt6(y) << "\" width=\"" << fmt6(w)
        << "\" height=\"" << fmt6(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
        << "\"/>\n";
}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width) {
  body_ << "<line x1=\"" << fmt6(x1) << "\" y1=\"" << fmt6(y1) << "\" x2=\"" << fmt6(x2)
        << "\" y2=\"" << fmt6(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
        << fmt6(width) << "\"/>\n";
}

void Canvas::polyline(const std::vector<std::pair<double, double>>& pts,
                      const std::string& stroke, double width) {
  body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << fmt6(width)
        << "\" points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) body_ << " ";
    body_ << fmt6(pts[i].first) << "," << fmt6(pts[i].second);
  }
  body_ << "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ << "<circle cx=\"" << fmt6(cx) << "\" cy=\"" << fmt6(cy) << "\" r=\"" << fmt6(r)
        << "\" fill=\"" << fill << "\"/>\n";
}

void Canvas::text(double x, double y, const std::string& content, double size,
                  const std::string& anchor, const std::string& fill, bool bold) {
  body_ << "<text x=\"" << fmt6(x) << "\" y=\"" << fmt6(y) << "\" font-size=\"" << fmt6(size)
        << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill
        << "\"";
  if (bold) body_ << " font-weight=\"bold\"";
  body_ << ">" << escape_text(content) << "</text>\n";
}

std::string Canvas::finish() const {
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt6(width_) << "\" height=\""
      << fmt6(height_) << "\" viewBox=\"0 0 " << fmt6(width_) << " " << fmt6(height_) << "\">\n";
  out << body_.str();
  out << "</svg>\n";
  return out.str();
}

}  // namespace dowlab::svg
