#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "rigidity/error.hpp"
#include "rigidity/vec2.hpp"

namespace rigidity {

struct LineSegment {
  Vec2 a;
  Vec2 b;
};

/// Arc of the circle |p - center| = radius starting at start_angle and
/// turning by sweep (positive = counter-clockwise).
struct CircularArc {
  Vec2 center;
  double radius = 1.0;
  double start_angle = 0.0;
  double sweep = two_pi;
};

/// Sampled smooth curve. The polyline itself is the boundary; it is not
/// re-interpolated.
struct Polyline {
  std::vector<Vec2> points;
};

using BoundaryPiece = std::variant<LineSegment, CircularArc, Polyline>;

struct BoundaryComponent {
  std::vector<BoundaryPiece> pieces;
  bool closed = true;
};

struct ClipBox {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(Vec2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  double distance_to_edge(Vec2 p) const {
    return std::min({p.x - xmin, xmax - p.x, p.y - ymin, ymax - p.y});
  }
};

/// A planar domain given by its oriented boundary (domain on the left).
/// Open components are only meaningful together with a clip box: the domain
/// is unbounded and its boundary continues along the end tangents.
struct Domain {
  std::vector<BoundaryComponent> components;
  std::optional<ClipBox> clip_box;
};

/// Arc-length address of a boundary location.
struct BoundaryPoint {
  std::size_t component = 0;
  double s = 0.0;
};

// ---------------------------------------------------------------------------
// Piece geometry. Local parameter t is arc length from the piece start.

inline double piece_length(const BoundaryPiece& piece) {
  return std::visit(
      [](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return distance(p.a, p.b);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          return p.radius * std::abs(p.sweep);
        } else {
          double len = 0.0;
          for (std::size_t i = 1; i < p.points.size(); ++i) len += distance(p.points[i - 1], p.points[i]);
          return len;
        }
      },
      piece);
}

inline Vec2 arc_point_at_angle(const CircularArc& arc, double angle) {
  return arc.center + unit_at(angle) * arc.radius;
}

inline double arc_end_angle(const CircularArc& arc) { return arc.start_angle + arc.sweep; }

inline Vec2 piece_point(const BoundaryPiece& piece, double t) {
  return std::visit(
      [t](const auto& p) -> Vec2 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          const double len = distance(p.a, p.b);
          return p.a + (p.b - p.a) * (t / len);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          const double sign = p.sweep >= 0.0 ? 1.0 : -1.0;
          return arc_point_at_angle(p, p.start_angle + sign * t / p.radius);
        } else {
          double acc = 0.0;
          for (std::size_t i = 1; i < p.points.size(); ++i) {
            const double len = distance(p.points[i - 1], p.points[i]);
            if (t <= acc + len || i + 1 == p.points.size()) {
              const double u = std::clamp((t - acc) / len, 0.0, 1.0);
              return p.points[i - 1] + (p.points[i] - p.points[i - 1]) * u;
            }
            acc += len;
          }
          return p.points.back();
        }
      },
      piece);
}

/// Forward unit tangent; on a polyline vertex the outgoing edge is used.
inline Vec2 piece_tangent(const BoundaryPiece& piece, double t) {
  return std::visit(
      [t](const auto& p) -> Vec2 {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return normalized(p.b - p.a);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          const double sign = p.sweep >= 0.0 ? 1.0 : -1.0;
          const double angle = p.start_angle + sign * t / p.radius;
          return perp(unit_at(angle)) * sign;
        } else {
          double acc = 0.0;
          for (std::size_t i = 1; i < p.points.size(); ++i) {
            const double len = distance(p.points[i - 1], p.points[i]);
            if (t < acc + len || i + 1 == p.points.size()) return normalized(p.points[i] - p.points[i - 1]);
            acc += len;
          }
          return normalized(p.points.back() - p.points[p.points.size() - 2]);
        }
      },
      piece);
}

/// Tangent arriving at the end of the piece (left-hand tangent at its end point).
inline Vec2 piece_end_tangent(const BoundaryPiece& piece) {
  if (const auto* poly = std::get_if<Polyline>(&piece)) {
    const auto& pts = poly->points;
    return normalized(pts.back() - pts[pts.size() - 2]);
  }
  return piece_tangent(piece, piece_length(piece));
}

inline Vec2 piece_start(const BoundaryPiece& piece) { return piece_point(piece, 0.0); }
inline Vec2 piece_end(const BoundaryPiece& piece) {
  if (const auto* poly = std::get_if<Polyline>(&piece)) return poly->points.back();
  if (const auto* seg = std::get_if<LineSegment>(&piece)) return seg->b;
  return arc_point_at_angle(std::get<CircularArc>(piece), arc_end_angle(std::get<CircularArc>(piece)));
}

/// Signed curvature of a circular arc relative to its traversal (positive = turning left).
inline double arc_curvature(const CircularArc& arc) { return (arc.sweep >= 0.0 ? 1.0 : -1.0) / arc.radius; }

// ---------------------------------------------------------------------------
// Components.

inline double component_length(const BoundaryComponent& c) {
  double len = 0.0;
  for (const auto& piece : c.pieces) len += piece_length(piece);
  return len;
}

/// Cumulative arc length at the start of each piece, plus the total at the end.
inline std::vector<double> piece_offsets(const BoundaryComponent& c) {
  std::vector<double> offs;
  offs.reserve(c.pieces.size() + 1);
  double acc = 0.0;
  offs.push_back(0.0);
  for (const auto& piece : c.pieces) {
    acc += piece_length(piece);
    offs.push_back(acc);
  }
  return offs;
}

struct PieceLocation {
  std::size_t piece = 0;
  double t = 0.0;
};

/// Locates arc length s on the component; at a junction the following piece wins.
inline PieceLocation locate(const BoundaryComponent& c, double s) {
  const auto offs = piece_offsets(c);
  const double total = offs.back();
  if (!(s >= 0.0) || s > total || (c.closed && s >= total && total > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "arc length " + std::to_string(s) + " outside [0, " + std::to_string(total) + ")");
  }
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    if (s < offs[i + 1]) return {i, s - offs[i]};
  }
  const std::size_t last = c.pieces.size() - 1;
  return {last, piece_length(c.pieces[last])};
}

inline Vec2 component_point(const BoundaryComponent& c, double s) {
  const auto loc = locate(c, s);
  return piece_point(c.pieces[loc.piece], loc.t);
}

inline Vec2 component_tangent(const BoundaryComponent& c, double s) {
  const auto loc = locate(c, s);
  const auto& piece = c.pieces[loc.piece];
  if (loc.t >= piece_length(piece)) return piece_end_tangent(piece);
  return piece_tangent(piece, loc.t);
}

/// Wraps s into [0, L) for closed components and clamps for open ones.
inline double wrap_parameter(const BoundaryComponent& c, double s) {
  const double total = component_length(c);
  if (c.closed) {
    double r = std::fmod(s, total);
    if (r < 0.0) r += total;
    if (r >= total) r = 0.0;
    return r;
  }
  return std::clamp(s, 0.0, total);
}

inline const BoundaryComponent& component_of(const Domain& d, const BoundaryPoint& p) {
  if (p.component >= d.components.size()) throw Error(ErrorKind::OutOfRange, "component index out of range");
  return d.components[p.component];
}

inline Vec2 point_at(const Domain& d, const BoundaryPoint& p) { return component_point(component_of(d, p), p.s); }
inline Vec2 tangent_at(const Domain& d, const BoundaryPoint& p) { return component_tangent(component_of(d, p), p.s); }

/// n equally spaced parameters starting at offset (wrapped for closed components).
inline std::vector<BoundaryPoint> equally_spaced(const Domain& d, std::size_t component, std::size_t n, double offset = 0.0) {
  const auto& c = d.components.at(component);
  const double total = component_length(c);
  std::vector<BoundaryPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double step = c.closed ? total / static_cast<double>(n) : total / static_cast<double>(std::max<std::size_t>(n, 2) - 1);
    pts.push_back({component, wrap_parameter(c, offset + step * static_cast<double>(i))});
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Rigid motions.

/// p -> R(rotation) * (reflection ? mirror_x(p) : p) + translation, where
/// mirror_x flips the y coordinate.
struct RigidMotion {
  double rotation = 0.0;
  Vec2 translation;
  bool reflection = false;

  Vec2 apply(Vec2 p) const {
    if (reflection) p.y = -p.y;
    return rotated(p, rotation) + translation;
  }
  Vec2 apply_direction(Vec2 v) const {
    if (reflection) v.y = -v.y;
    return rotated(v, rotation);
  }
};

inline BoundaryPiece transformed(const BoundaryPiece& piece, const RigidMotion& m) {
  return std::visit(
      [&m](const auto& p) -> BoundaryPiece {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return LineSegment{m.apply(p.a), m.apply(p.b)};
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          const double start = m.reflection ? -p.start_angle : p.start_angle;
          const double sweep = m.reflection ? -p.sweep : p.sweep;
          return CircularArc{m.apply(p.center), p.radius, start + m.rotation, sweep};
        } else {
          Polyline out;
          out.points.reserve(p.points.size());
          for (auto q : p.points) out.points.push_back(m.apply(q));
          return out;
        }
      },
      piece);
}

inline BoundaryPiece reversed(const BoundaryPiece& piece) {
  return std::visit(
      [](const auto& p) -> BoundaryPiece {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return LineSegment{p.b, p.a};
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          return CircularArc{p.center, p.radius, p.start_angle + p.sweep, -p.sweep};
        } else {
          Polyline out{p.points};
          std::reverse(out.points.begin(), out.points.end());
          return out;
        }
      },
      piece);
}

inline BoundaryComponent reversed(const BoundaryComponent& c) {
  BoundaryComponent out;
  out.closed = c.closed;
  for (auto it = c.pieces.rbegin(); it != c.pieces.rend(); ++it) out.pieces.push_back(reversed(*it));
  return out;
}

/// Sub-piece between local arc lengths t0 < t1.
inline BoundaryPiece trimmed(const BoundaryPiece& piece, double t0, double t1) {
  return std::visit(
      [&](const auto& p) -> BoundaryPiece {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, LineSegment>) {
          return LineSegment{piece_point(piece, t0), piece_point(piece, t1)};
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          const double sign = p.sweep >= 0.0 ? 1.0 : -1.0;
          return CircularArc{p.center, p.radius, p.start_angle + sign * t0 / p.radius, sign * (t1 - t0) / p.radius};
        } else {
          Polyline out;
          out.points.push_back(piece_point(piece, t0));
          double acc = 0.0;
          for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
            acc += distance(p.points[i], p.points[i + 1]);
            if (acc > t0 && acc < t1) out.points.push_back(p.points[i + 1]);
          }
          const Vec2 end = piece_point(piece, t1);
          if (!(end == out.points.back())) out.points.push_back(end);
          return out;
        }
      },
      piece);
}

/// Pieces of the component restricted to arc lengths [s0, s1] (no wrap).
inline std::vector<BoundaryPiece> sub_pieces(const BoundaryComponent& c, double s0, double s1) {
  std::vector<BoundaryPiece> out;
  const auto offs = piece_offsets(c);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const double a = std::max(s0, offs[i]), b = std::min(s1, offs[i + 1]);
    if (b - a <= 1e-14 * std::max(1.0, offs.back())) continue;
    if (a == offs[i] && b == offs[i + 1]) {
      out.push_back(c.pieces[i]);
    } else {
      out.push_back(trimmed(c.pieces[i], a - offs[i], b - offs[i]));
    }
  }
  return out;
}

/// Applies a rigid motion. Reflections reverse every component so the domain
/// stays on the left; the arc-length parameter s of a closed component then
/// corresponds to L - s.
inline Domain transformed(const Domain& d, const RigidMotion& m) {
  Domain out;
  for (const auto& c : d.components) {
    BoundaryComponent tc;
    tc.closed = c.closed;
    for (const auto& piece : c.pieces) tc.pieces.push_back(transformed(piece, m));
    out.components.push_back(m.reflection ? reversed(tc) : tc);
  }
  if (d.clip_box) {
    // The clip box is axis-aligned; transform its corners and take the bounds.
    const auto& b = *d.clip_box;
    const std::array<Vec2, 4> corners{Vec2{b.xmin, b.ymin}, Vec2{b.xmax, b.ymin}, Vec2{b.xmax, b.ymax}, Vec2{b.xmin, b.ymax}};
    ClipBox nb{1e300, 1e300, -1e300, -1e300};
    for (auto q : corners) {
      const Vec2 t = m.apply(q);
      nb.xmin = std::min(nb.xmin, t.x);
      nb.ymin = std::min(nb.ymin, t.y);
      nb.xmax = std::max(nb.xmax, t.x);
      nb.ymax = std::max(nb.ymax, t.y);
    }
    out.clip_box = nb;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense sampling and diameter.

/// Samples the component with spacing at most max_step (piece endpoints included).
inline std::vector<Vec2> dense_samples(const BoundaryComponent& c, double max_step) {
  std::vector<Vec2> pts;
  for (const auto& piece : c.pieces) {
    if (const auto* poly = std::get_if<Polyline>(&piece)) {
      for (std::size_t i = 0; i + 1 < poly->points.size(); ++i) {
        const Vec2 a = poly->points[i], b = poly->points[i + 1];
        const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / max_step)));
        for (int k = 0; k < n; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
      }
      continue;
    }
    const double len = piece_length(piece);
    const int n = std::max(1, static_cast<int>(std::ceil(len / max_step)));
    for (int k = 0; k < n; ++k) pts.push_back(piece_point(piece, len * static_cast<double>(k) / n));
  }
  if (!c.pieces.empty()) pts.push_back(piece_end(c.pieces.back()));
  return pts;
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, no collinear points.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Diameter of the stored boundary (clip box excluded).
inline double domain_diameter(const Domain& d) {
  double total = 0.0;
  for (const auto& c : d.components) total += component_length(c);
  std::vector<Vec2> pts;
  for (const auto& c : d.components) {
    auto s = dense_samples(c, total / 4096.0);
    pts.insert(pts.end(), s.begin(), s.end());
  }
  const auto hull = convex_hull(pts);
  if (hull.size() < 3) return hull.size() == 2 ? distance(hull[0], hull[1]) : 0.0;
  // Rotating calipers over antipodal pairs.
  const std::size_t n = hull.size();
  double best = 0.0;
  std::size_t j = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = hull[i], b = hull[(i + 1) % n];
    while (std::abs(orient(a, b, hull[(j + 1) % n])) > std::abs(orient(a, b, hull[j]))) j = (j + 1) % n;
    best = std::max({best, distance(a, hull[j]), distance(b, hull[j])});
  }
  return best;
}

}  // namespace rigidity
