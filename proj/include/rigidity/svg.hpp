#pragma once

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rigidity/domain.hpp"

namespace rigidity {

/// Minimal SVG writer. World coordinates are y-up; the viewport is y-down:
///   X = pad + (x - xmin) * scale,  Y = pad + (ymax - y) * scale.
/// Stroke widths are fractions of the drawing's world diameter.
class SvgCanvas {
 public:
  explicit SvgCanvas(double width_px = 800.0) : width_px_(width_px) {}

  void add_domain(const Domain& d, const std::string& color) {
    for (const auto& c : d.components) {
      add_polyline(dense_samples(c, component_length(c) / 1024), color, 1.0);
    }
    if (d.clip_box) {
      const auto& b = *d.clip_box;
      add_polyline({{b.xmin, b.ymin}, {b.xmax, b.ymin}, {b.xmax, b.ymax}, {b.xmin, b.ymax}, {b.xmin, b.ymin}}, "#999999", 0.5, true);
    }
  }

  void add_polyline(const std::vector<Vec2>& pts, const std::string& color, double weight = 1.0, bool dashed = false) {
    if (pts.empty()) return;
    lines_.push_back({pts, color, weight, dashed});
    for (Vec2 p : pts) extend(p);
  }

  void add_point(Vec2 p, const std::string& color) {
    points_.push_back({p, color});
    extend(p);
  }

  void write(std::ostream& os) const {
    const double w = std::max(hi_.x - lo_.x, 1e-12), h = std::max(hi_.y - lo_.y, 1e-12);
    const double pad = 20.0;
    const double scale = (width_px_ - 2 * pad) / std::max(w, h);
    const double stroke = std::max(0.003 * std::hypot(w, h) * scale, 0.5);
    const double W = w * scale + 2 * pad, H = h * scale + 2 * pad;
    auto X = [&](double x) { return pad + (x - lo_.x) * scale; };
    auto Y = [&](double y) { return pad + (hi_.y - y) * scale; };
    char buf[256];
    std::snprintf(buf, sizeof buf, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.2f\" height=\"%.2f\" viewBox=\"0 0 %.2f %.2f\">\n", W, H, W, H);
    os << buf;
    std::snprintf(buf, sizeof buf, "<!-- y-up frame: X = %.2f + (x - %.9g) * %.9g, Y = %.2f + (%.9g - y) * %.9g -->\n", pad, lo_.x, scale, pad,
                  hi_.y, scale);
    os << buf;
    for (const auto& l : lines_) {
      os << "<polyline fill=\"none\" stroke=\"" << l.color << "\"";
      std::snprintf(buf, sizeof buf, " stroke-width=\"%.3f\"", stroke * l.weight);
      os << buf;
      if (l.dashed) os << " stroke-dasharray=\"6 4\"";
      os << " points=\"";
      for (std::size_t i = 0; i < l.pts.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.3f,%.3f", i ? " " : "", X(l.pts[i].x), Y(l.pts[i].y));
        os << buf;
      }
      os << "\"/>\n";
    }
    for (const auto& p : points_) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\" fill=\"", X(p.p.x), Y(p.p.y), 2.5 * stroke);
      os << buf << p.color << "\"/>\n";
    }
    os << "</svg>\n";
  }

 private:
  struct Line {
    std::vector<Vec2> pts;
    std::string color;
    double weight;
    bool dashed;
  };
  struct Dot {
    Vec2 p;
    std::string color;
  };

  void extend(Vec2 p) {
    lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
    hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
  }

  double width_px_;
  std::vector<Line> lines_;
  std::vector<Dot> points_;
  Vec2 lo_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Vec2 hi_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

}  // namespace rigidity
