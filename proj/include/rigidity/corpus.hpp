#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rigidity/domain.hpp"

// Small library of test domains.

namespace rigidity::corpus {

/// Closed polygon through the given CCW vertices.
inline Domain polygon(const std::vector<Vec2>& v) {
  BoundaryComponent c;
  for (std::size_t i = 0; i < v.size(); ++i) c.pieces.push_back(LineSegment{v[i], v[(i + 1) % v.size()]});
  return Domain{{c}, std::nullopt};
}

inline Domain disk(double r = 1.0, Vec2 center = {}) {
  return Domain{{BoundaryComponent{{CircularArc{center, r, 0.0, two_pi}}, true}}, std::nullopt};
}

inline Domain unit_square() { return polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

/// Two unit semicircles joined by two length-2 segments.
inline Domain stadium() {
  BoundaryComponent c;
  c.pieces.push_back(LineSegment{{-1, -1}, {1, -1}});
  c.pieces.push_back(CircularArc{{1, 0}, 1.0, -pi / 2, pi});
  c.pieces.push_back(LineSegment{{1, 1}, {-1, 1}});
  c.pieces.push_back(CircularArc{{-1, 0}, 1.0, pi / 2, pi});
  return Domain{{c}, std::nullopt};
}

inline Domain l_hexagon() { return polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}); }

/// L-hexagon with the reflex corner replaced by a concave fillet.
inline Domain smoothed_l(double fillet = 0.1) {
  BoundaryComponent c;
  c.pieces.push_back(LineSegment{{0, 0}, {2, 0}});
  c.pieces.push_back(LineSegment{{2, 0}, {2, 1}});
  c.pieces.push_back(LineSegment{{2, 1}, {1 + fillet, 1}});
  c.pieces.push_back(CircularArc{{1 + fillet, 1 + fillet}, fillet, -pi / 2, -pi / 2});
  c.pieces.push_back(LineSegment{{1, 1 + fillet}, {1, 2}});
  c.pieces.push_back(LineSegment{{1, 2}, {0, 2}});
  c.pieces.push_back(LineSegment{{0, 2}, {0, 0}});
  return Domain{{c}, std::nullopt};
}

inline Domain ellipse(double a, double b, std::size_t n) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = two_pi * static_cast<double>(i % n) / static_cast<double>(n);
    pts.push_back({a * std::cos(t), b * std::sin(t)});
  }
  return Domain{{BoundaryComponent{{Polyline{pts}}, true}}, std::nullopt};
}

inline Domain regular_ngon(std::size_t n, double r = 1.0, double phase = 0.0) {
  std::vector<Vec2> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back(unit_at(phase + two_pi * static_cast<double>(i) / static_cast<double>(n)) * r);
  return polygon(v);
}

/// Lemniscate-like closed polyline crossing itself at the origin.
inline Domain figure_eight(std::size_t n = 64) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = two_pi * static_cast<double>(i % n) / static_cast<double>(n);
    pts.push_back({std::sin(t), std::sin(t) * std::cos(t)});
  }
  return Domain{{BoundaryComponent{{Polyline{pts}}, true}}, std::nullopt};
}

/// Annulus: outer CCW circle, inner CW circle.
inline Domain annulus(double r_out = 2.0, double r_in = 1.0) {
  return Domain{{BoundaryComponent{{CircularArc{{}, r_out, 0.0, two_pi}}, true},
                 BoundaryComponent{{CircularArc{{}, r_in, 0.0, -two_pi}}, true}},
                std::nullopt};
}

}  // namespace rigidity::corpus
