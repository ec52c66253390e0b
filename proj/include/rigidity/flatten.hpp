#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/tolerances.hpp"
#include "rigidity/vec2.hpp"

namespace rigidity {

/// Polygonal approximation of a domain used by the metric computations.
///
/// Convex arcs (domain side) are replaced by inscribed polygons and concave
/// arcs by tangent polygons whose vertices alternate between points on the
/// arc and tangent intersections. The polygonal region is therefore contained
/// in the true domain, so every polygonal path is admissible and polygonal
/// geodesics overestimate the true ones. Subdivision counts are powers of two,
/// which makes successive refinements nested.
struct FlatPolygon {
  std::vector<Vec2> vertices;
  /// Rings as half-open index ranges; each ring is cyclic.
  std::vector<std::pair<std::size_t, std::size_t>> rings;
  /// Edge i -> next(i) lies on the clip box (not a real boundary).
  std::vector<bool> artificial_edge;
  /// Vertex index of each required boundary point, in request order.
  std::vector<std::size_t> required;
  /// Upper bound on how much a polygonal geodesic can exceed the true one.
  double length_bound = 0.0;
  double diameter = 0.0;
  std::optional<ClipBox> clip_box;

  std::size_t ring_of(std::size_t v) const {
    for (std::size_t r = 0; r < rings.size(); ++r)
      if (v >= rings[r].first && v < rings[r].second) return r;
    return rings.size();
  }
  std::size_t next(std::size_t v) const {
    const auto& r = rings[ring_of(v)];
    return v + 1 == r.second ? r.first : v + 1;
  }
  std::size_t prev(std::size_t v) const {
    const auto& r = rings[ring_of(v)];
    return v == r.first ? r.second - 1 : v - 1;
  }
  std::size_t size() const { return vertices.size(); }

  /// Normalized turn at vertex v: sine of the exterior angle (negative = reflex).
  double turn(std::size_t v) const {
    const Vec2 a = normalized(vertices[v] - vertices[prev(v)]);
    const Vec2 b = normalized(vertices[next(v)] - vertices[v]);
    return cross(a, b);
  }
  bool is_reflex(std::size_t v, double angle_tol) const {
    const Vec2 a = normalized(vertices[v] - vertices[prev(v)]);
    const Vec2 b = normalized(vertices[next(v)] - vertices[v]);
    return cross(a, b) < -angle_tol;
  }

  /// Inserts p on edge (v, next(v)); returns the new vertex index.
  std::size_t insert_on_edge(std::size_t v, Vec2 p) {
    const std::size_t r = ring_of(v);
    const std::size_t pos = v + 1;
    vertices.insert(vertices.begin() + static_cast<std::ptrdiff_t>(pos), p);
    artificial_edge.insert(artificial_edge.begin() + static_cast<std::ptrdiff_t>(pos), artificial_edge[v]);
    rings[r].second += 1;
    for (std::size_t k = r + 1; k < rings.size(); ++k) {
      rings[k].first += 1;
      rings[k].second += 1;
    }
    for (auto& idx : required)
      if (idx >= pos) ++idx;
    return pos;
  }
};

namespace detail {

struct PolyBuilder {
  std::vector<Vec2> pts;
  std::vector<bool> artificial;
  std::vector<std::pair<std::size_t, std::size_t>> tags;  // (required slot, vertex)
  double merge_tol = 0.0;

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  std::size_t push(Vec2 p, bool art = false) {
    if (!pts.empty() && distance(pts.back(), p) <= merge_tol) return pts.size() - 1;
    pts.push_back(p);
    artificial.push_back(art);
    return pts.size() - 1;
  }
};

inline std::size_t power_of_two_at_least(double x) {
  std::size_t n = 1;
  while (static_cast<double>(n) < x && n < (std::size_t{1} << 24)) n <<= 1;
  return n;
}

/// Point where the ray p + t d (t > 0) leaves the box; p must be inside.
inline Vec2 ray_box_exit(Vec2 p, Vec2 d, const ClipBox& box) {
  double t = std::numeric_limits<double>::infinity();
  if (d.x > 0) t = std::min(t, (box.xmax - p.x) / d.x);
  if (d.x < 0) t = std::min(t, (box.xmin - p.x) / d.x);
  if (d.y > 0) t = std::min(t, (box.ymax - p.y) / d.y);
  if (d.y < 0) t = std::min(t, (box.ymin - p.y) / d.y);
  return p + d * t;
}

/// Counter-clockwise perimeter coordinate of a point on the box boundary.
inline double box_perimeter_coord(Vec2 p, const ClipBox& b) {
  const double w = b.width(), h = b.height();
  const double dx0 = std::abs(p.y - b.ymin), dx1 = std::abs(p.x - b.xmax), dx2 = std::abs(p.y - b.ymax), dx3 = std::abs(p.x - b.xmin);
  const double m = std::min({dx0, dx1, dx2, dx3});
  if (m == dx0) return std::clamp(p.x - b.xmin, 0.0, w);
  if (m == dx1) return w + std::clamp(p.y - b.ymin, 0.0, h);
  if (m == dx2) return w + h + std::clamp(b.xmax - p.x, 0.0, w);
  return 2 * w + h + std::clamp(b.ymax - p.y, 0.0, h);
}

}  // namespace detail

/// Flattens the domain. required points become polygon vertices placed
/// exactly on the boundary. tau_flat is an absolute chord/tangent sag.
inline FlatPolygon flatten(const Domain& d, double tau_flat, const std::vector<BoundaryPoint>& required_points = {}) {
  if (d.components.empty()) throw Error(ErrorKind::InvalidInput, "domain has no components");
  if (!(tau_flat > 0.0)) throw Error(ErrorKind::InvalidInput, "flattening tolerance must be positive");

  FlatPolygon poly;
  poly.diameter = domain_diameter(d);
  poly.clip_box = d.clip_box;
  poly.required.assign(required_points.size(), detail::PolyBuilder::npos);
  double concave_turning = 0.0;
  const double merge_tol = 1e-12 * std::max(poly.diameter, 1.0);

  std::size_t open_count = 0;
  for (const auto& c : d.components) open_count += c.closed ? 0 : 1;
  if (open_count > 0 && !d.clip_box) throw Error(ErrorKind::InvalidInput, "open boundary component requires a clip box");
  if (open_count > 1) throw Error(ErrorKind::InvalidInput, "at most one open boundary component is supported");

  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& comp = d.components[ci];
    if (comp.pieces.empty()) throw Error(ErrorKind::InvalidInput, "empty boundary component");
    const auto offs = piece_offsets(comp);

    // Required parameters grouped per piece: (t, slot).
    std::vector<std::vector<std::pair<double, std::size_t>>> per_piece(comp.pieces.size());
    for (std::size_t k = 0; k < required_points.size(); ++k) {
      if (required_points[k].component != ci) continue;
      const auto loc = locate(comp, required_points[k].s);
      per_piece[loc.piece].push_back({loc.t, k});
    }
    for (auto& v : per_piece) std::sort(v.begin(), v.end());

    detail::PolyBuilder b;
    b.merge_tol = merge_tol;
    auto tag = [&](std::size_t idx, std::size_t slot) { b.tags.push_back({slot, idx}); };

    for (std::size_t piece_idx = 0; piece_idx < comp.pieces.size(); ++piece_idx) {
      const auto& piece = comp.pieces[piece_idx];
      const auto& req = per_piece[piece_idx];
      const double len = piece_length(piece);

      if (const auto* arc = std::get_if<CircularArc>(&piece)) {
        const double sweep_abs = std::abs(arc->sweep);
        const double max_sub = 2.0 * std::acos(std::max(-1.0, 1.0 - tau_flat / arc->radius));
        const std::size_t n = detail::power_of_two_at_least(std::max(sweep_abs / max_sub, sweep_abs / (pi / 2.0)));
        // Merge uniform subdivision with required parameters.
        std::vector<std::pair<double, std::size_t>> ts;
        for (std::size_t k = 0; k < n; ++k) ts.push_back({len * static_cast<double>(k) / static_cast<double>(n), detail::PolyBuilder::npos});
        for (const auto& r : req) ts.push_back(r);
        std::sort(ts.begin(), ts.end(), [](const auto& x, const auto& y) { return x.first < y.first || (x.first == y.first && x.second < y.second); });
        const bool concave = arc->sweep < 0.0;
        if (concave) concave_turning += sweep_abs;
        const double sign = arc->sweep >= 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
          const std::size_t idx = b.push(piece_point(piece, ts[k].first));
          if (ts[k].second != detail::PolyBuilder::npos) tag(idx, ts[k].second);
          if (concave) {
            const double t_next = k + 1 < ts.size() ? ts[k + 1].first : len;
            const double dtheta = (t_next - ts[k].first) / arc->radius;
            if (dtheta > 1e-9) {
              const double mid = arc->start_angle + sign * (ts[k].first + t_next) / (2.0 * arc->radius);
              b.push(arc->center + unit_at(mid) * (arc->radius / std::cos(dtheta / 2.0)));
            }
          }
        }
      } else if (const auto* poly_piece = std::get_if<Polyline>(&piece)) {
        double acc = 0.0;
        std::size_t r = 0;
        const std::size_t n_edges = poly_piece->points.size() - 1;
        for (std::size_t k = 0; k < n_edges; ++k) {
          const Vec2 a = poly_piece->points[k], e = poly_piece->points[k + 1];
          const double el = distance(a, e);
          b.push(a);
          while (r < req.size() && (req[r].first < acc + el || k + 1 == n_edges)) {
            const double u = std::clamp((req[r].first - acc) / el, 0.0, 1.0);
            tag(b.push(a + (e - a) * u), req[r].second);
            ++r;
          }
          acc += el;
        }
      } else {
        b.push(piece_start(piece));
        for (const auto& r : req) tag(b.push(piece_point(piece, r.first)), r.second);
      }
    }

    if (comp.closed) {
      // Drop a closing duplicate, keeping any tag it carries.
      if (b.pts.size() > 1 && distance(b.pts.front(), b.pts.back()) <= merge_tol * 1e3) {
        for (auto& [slot, idx] : b.tags)
          if (idx == b.pts.size() - 1) idx = 0;
        b.pts.pop_back();
        b.artificial.pop_back();
      }
    } else {
      const Vec2 end = piece_end(comp.pieces.back());
      const std::size_t last = b.push(end);
      // Required points at the open end sit exactly on the end vertex.
      for (const auto& r : per_piece.back())
        if (r.first >= piece_length(comp.pieces.back())) tag(last, r.second);
      const auto& box = *d.clip_box;
      const Vec2 start = piece_start(comp.pieces.front());
      const Vec2 end_dir = piece_end_tangent(comp.pieces.back());
      const Vec2 start_dir = piece_tangent(comp.pieces.front(), 0.0);
      if (!box.contains(start) || !box.contains(end)) throw Error(ErrorKind::InvalidInput, "open component endpoints must lie inside the clip box");
      const Vec2 exit_end = detail::ray_box_exit(end, end_dir, box);
      const Vec2 exit_start = detail::ray_box_exit(start, -start_dir, box);
      b.push(exit_end);
      b.artificial.back() = true;
      const double te = detail::box_perimeter_coord(exit_end, box);
      double ts = detail::box_perimeter_coord(exit_start, box);
      const double perim = 2.0 * (box.width() + box.height());
      if (ts <= te) ts += perim;
      const std::array<double, 4> corner_coords{0.0, box.width(), box.width() + box.height(), 2.0 * box.width() + box.height()};
      const std::array<Vec2, 4> corners{Vec2{box.xmin, box.ymin}, Vec2{box.xmax, box.ymin}, Vec2{box.xmax, box.ymax}, Vec2{box.xmin, box.ymax}};
      std::vector<std::pair<double, Vec2>> path;
      for (int lap = 0; lap < 2; ++lap)
        for (std::size_t k = 0; k < 4; ++k) {
          const double cc = corner_coords[k] + lap * perim;
          if (cc > te && cc < ts) path.push_back({cc, corners[k]});
        }
      std::sort(path.begin(), path.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& [coord, corner] : path) {
        b.push(corner);
        b.artificial.back() = true;
      }
      b.push(exit_start);
      // Edge exit_start -> start is the backward extension of the boundary.
    }

    const std::size_t base = poly.vertices.size();
    poly.vertices.insert(poly.vertices.end(), b.pts.begin(), b.pts.end());
    poly.artificial_edge.insert(poly.artificial_edge.end(), b.artificial.begin(), b.artificial.end());
    poly.rings.push_back({base, poly.vertices.size()});
    for (const auto& [slot, idx] : b.tags) poly.required[slot] = base + idx;
  }

  for (std::size_t k = 0; k < poly.required.size(); ++k)
    if (poly.required[k] == detail::PolyBuilder::npos) throw Error(ErrorKind::InvalidInput, "required boundary point could not be placed");

  // Tangent polygons exceed the arc length by about (2/3) * turning * sag.
  poly.length_bound = (2.0 / 3.0) * concave_turning * tau_flat;
  return poly;
}

/// Point-in-closure test against the flattened polygon: true when p is inside
/// or within tol of the boundary.
inline bool contains_closed(const FlatPolygon& poly, Vec2 p, double tol) {
  bool inside = false;
  for (const auto& [first, last] : poly.rings) {
    for (std::size_t i = first; i < last; ++i) {
      const Vec2 a = poly.vertices[i];
      const Vec2 b = poly.vertices[i + 1 == last ? first : i + 1];
      if (segment_distance(p, a, b) <= tol) return true;
      if ((a.y > p.y) != (b.y > p.y)) {
        const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (p.x < x) inside = !inside;
      }
    }
  }
  return inside;
}

/// Strict interior test: inside and farther than tol from every edge.
inline bool contains_strictly(const FlatPolygon& poly, Vec2 p, double tol) {
  for (const auto& [first, last] : poly.rings)
    for (std::size_t i = first; i < last; ++i)
      if (segment_distance(p, poly.vertices[i], poly.vertices[i + 1 == last ? first : i + 1]) <= tol) return false;
  return contains_closed(poly, p, 0.0);
}

}  // namespace rigidity
