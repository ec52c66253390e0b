#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/flatten.hpp"
#include "rigidity/tolerances.hpp"

namespace rigidity {

enum class IssueKind { BadPiece, JoinGap, NotClosed, SelfIntersection, ComponentsIntersect, Orientation, Clip };

inline const char* to_string(IssueKind k) {
  switch (k) {
    case IssueKind::BadPiece: return "bad_piece";
    case IssueKind::JoinGap: return "join_gap";
    case IssueKind::NotClosed: return "not_closed";
    case IssueKind::SelfIntersection: return "self_intersection";
    case IssueKind::ComponentsIntersect: return "components_intersect";
    case IssueKind::Orientation: return "orientation";
    case IssueKind::Clip: return "clip";
  }
  return "unknown";
}

struct Issue {
  IssueKind kind;
  std::size_t component = 0;
  std::size_t piece = 0;  // for joins: the piece whose end fails to meet the next start
  std::string message;
};

/// A junction where the left and right tangents disagree by more than the
/// turn tolerance (the boundary is Lipschitz but not C^1 there).
struct Corner {
  std::size_t component = 0;
  double s = 0.0;
  double angle = 0.0;  // signed turn, positive = left
};

struct ValidationReport {
  std::vector<Issue> issues;
  std::vector<Corner> corners;

  bool valid() const { return issues.empty(); }
  bool smooth() const { return corners.empty(); }
};

/// Signed turning angles at every piece junction and, optionally, at interior
/// polyline vertices. For closed components the junction at s = 0 is included.
inline std::vector<Corner> junction_turns(const BoundaryComponent& c, std::size_t component_index = 0, bool polyline_vertices = true) {
  std::vector<Corner> out;
  const auto offs = piece_offsets(c);
  const std::size_t n = c.pieces.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto* poly = std::get_if<Polyline>(&c.pieces[i]);
    if (poly && polyline_vertices) {
      double acc = offs[i];
      for (std::size_t k = 1; k + 1 < poly->points.size(); ++k) {
        acc += distance(poly->points[k - 1], poly->points[k]);
        const Vec2 a = poly->points[k] - poly->points[k - 1];
        const Vec2 b = poly->points[k + 1] - poly->points[k];
        out.push_back({component_index, acc, turn_angle(a, b)});
      }
    }
    if (i + 1 < n || c.closed) {
      const auto& next = c.pieces[(i + 1) % n];
      const double s = i + 1 < n ? offs[i + 1] : 0.0;
      out.push_back({component_index, s, turn_angle(piece_end_tangent(c.pieces[i]), piece_tangent(next, 0.0))});
    }
  }
  std::sort(out.begin(), out.end(), [](const Corner& a, const Corner& b) { return a.s < b.s; });
  return out;
}

namespace detail {

inline bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  // True when the closed segments come within tol of each other.
  const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return segment_distance(c, a, b) <= tol || segment_distance(d, a, b) <= tol || segment_distance(a, c, d) <= tol ||
         segment_distance(b, c, d) <= tol;
}

/// Coarse polyline through the component (arcs sampled every ~2 degrees).
inline std::vector<Vec2> trace(const BoundaryComponent& c) {
  std::vector<Vec2> pts;
  for (const auto& piece : c.pieces) {
    if (const auto* poly = std::get_if<Polyline>(&piece)) {
      pts.insert(pts.end(), poly->points.begin(), poly->points.end() - 1);
    } else if (const auto* arc = std::get_if<CircularArc>(&piece)) {
      const int n = std::max(2, static_cast<int>(std::ceil(std::abs(arc->sweep) / (pi / 90.0))));
      const double len = piece_length(piece);
      for (int k = 0; k < n; ++k) pts.push_back(piece_point(piece, len * k / n));
    } else {
      pts.push_back(piece_start(piece));
    }
  }
  pts.push_back(piece_end(c.pieces.back()));
  return pts;
}

inline double signed_area(const std::vector<Vec2>& ring) {
  double a = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) a += cross(ring[i], ring[(i + 1) % ring.size()]);
  return 0.5 * a;
}

}  // namespace detail

/// Checks every structural invariant of the domain and lists the junctions
/// that break C^1 smoothness. Never throws for geometric problems.
inline ValidationReport validate(const Domain& d, const Tolerances& tol = default_tolerances) {
  ValidationReport report;
  if (d.components.empty()) {
    report.issues.push_back({IssueKind::BadPiece, 0, 0, "domain has no components"});
    return report;
  }

  bool pieces_ok = true;
  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& c = d.components[ci];
    if (c.pieces.empty()) {
      report.issues.push_back({IssueKind::BadPiece, ci, 0, "component has no pieces"});
      pieces_ok = false;
      continue;
    }
    for (std::size_t pi_ = 0; pi_ < c.pieces.size(); ++pi_) {
      const auto& piece = c.pieces[pi_];
      std::string bad;
      if (const auto* seg = std::get_if<LineSegment>(&piece)) {
        if (seg->a == seg->b) bad = "segment endpoints coincide";
      } else if (const auto* arc = std::get_if<CircularArc>(&piece)) {
        if (!(arc->radius > 0.0)) bad = "arc radius must be positive";
        else if (arc->sweep == 0.0 || std::abs(arc->sweep) > two_pi + 1e-12) bad = "arc sweep must be nonzero with |sweep| <= 2 pi";
      } else {
        const auto& pts = std::get<Polyline>(piece).points;
        if (pts.size() < 2) bad = "polyline needs at least two points";
        for (std::size_t k = 1; k < pts.size() && bad.empty(); ++k)
          if (pts[k] == pts[k - 1]) bad = "polyline has repeated consecutive points";
      }
      if (!bad.empty()) {
        report.issues.push_back({IssueKind::BadPiece, ci, pi_, bad});
        pieces_ok = false;
      }
    }
  }
  if (!pieces_ok) return report;

  const double diam = domain_diameter(d);
  const double join_tol = tol.join_rel * diam;
  const double simple_tol = tol.simple_rel * diam;

  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& c = d.components[ci];
    const std::size_t n = c.pieces.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double gap = distance(piece_end(c.pieces[i]), piece_start(c.pieces[i + 1]));
      if (gap > join_tol)
        report.issues.push_back({IssueKind::JoinGap, ci, i, "pieces " + std::to_string(i) + "/" + std::to_string(i + 1) + " gap " + std::to_string(gap)});
    }
    if (c.closed) {
      const double gap = distance(piece_end(c.pieces.back()), piece_start(c.pieces.front()));
      if (gap > join_tol) report.issues.push_back({IssueKind::NotClosed, ci, n - 1, "closing gap " + std::to_string(gap)});
    } else {
      if (!d.clip_box) report.issues.push_back({IssueKind::Clip, ci, 0, "open component without clip box"});
      else if (!d.clip_box->contains(piece_start(c.pieces.front())) || !d.clip_box->contains(piece_end(c.pieces.back())))
        report.issues.push_back({IssueKind::Clip, ci, 0, "open component endpoints outside clip box"});
    }
    for (const auto& corner : junction_turns(c, ci, false))
      if (std::abs(corner.angle) > tol.turn) report.corners.push_back(corner);
  }
  if (!report.issues.empty()) return report;

  // Simplicity and disjointness on a coarse trace.
  std::vector<std::vector<Vec2>> traces;
  for (const auto& c : d.components) traces.push_back(detail::trace(c));
  for (std::size_t ci = 0; ci < traces.size(); ++ci) {
    const auto& t = traces[ci];
    const bool closed = d.components[ci].closed;
    const std::size_t m = t.size() - 1;  // edges
    bool found = false;
    for (std::size_t i = 0; i < m && !found; ++i) {
      for (std::size_t j = i + 2; j < m && !found; ++j) {
        if (closed && i == 0 && j == m - 1) continue;
        if (detail::segments_cross(t[i], t[i + 1], t[j], t[j + 1], simple_tol)) {
          report.issues.push_back({IssueKind::SelfIntersection, ci, 0, "boundary crosses itself near (" + std::to_string(t[i].x) + ", " + std::to_string(t[i].y) + ")"});
          found = true;
        }
      }
    }
  }
  for (std::size_t ci = 0; ci < traces.size(); ++ci)
    for (std::size_t cj = ci + 1; cj < traces.size(); ++cj) {
      bool hit = false;
      for (std::size_t i = 0; i + 1 < traces[ci].size() && !hit; ++i)
        for (std::size_t j = 0; j + 1 < traces[cj].size() && !hit; ++j)
          hit = detail::segments_cross(traces[ci][i], traces[ci][i + 1], traces[cj][j], traces[cj][j + 1], simple_tol);
      if (hit) report.issues.push_back({IssueKind::ComponentsIntersect, ci, cj, "components intersect"});
    }
  if (!report.issues.empty()) return report;

  // Orientation: the component with the largest enclosed area is the outer one.
  std::vector<double> areas;
  for (std::size_t ci = 0; ci < traces.size(); ++ci) {
    auto ring = traces[ci];
    if (!d.components[ci].closed) {
      // Close through the clip box far side: the polygon used by the metric code.
      const auto& box = *d.clip_box;
      const Vec2 end = ring.back(), start = ring.front();
      const Vec2 e = detail::ray_box_exit(end, piece_end_tangent(d.components[ci].pieces.back()), box);
      const Vec2 s = detail::ray_box_exit(start, -piece_tangent(d.components[ci].pieces.front(), 0.0), box);
      const double te = detail::box_perimeter_coord(e, box);
      double ts = detail::box_perimeter_coord(s, box);
      const double perim = 2.0 * (box.width() + box.height());
      if (ts <= te) ts += perim;
      ring.push_back(e);
      const std::array<double, 4> cc{0.0, box.width(), box.width() + box.height(), 2.0 * box.width() + box.height()};
      const std::array<Vec2, 4> corners{Vec2{box.xmin, box.ymin}, Vec2{box.xmax, box.ymin}, Vec2{box.xmax, box.ymax}, Vec2{box.xmin, box.ymax}};
      for (int lap = 0; lap < 2; ++lap)
        for (std::size_t k = 0; k < 4; ++k)
          if (cc[k] + lap * perim > te && cc[k] + lap * perim < ts) ring.push_back(corners[k]);
      ring.push_back(s);
    } else {
      ring.pop_back();
    }
    areas.push_back(detail::signed_area(ring));
  }
  std::size_t outer = 0;
  for (std::size_t ci = 1; ci < areas.size(); ++ci)
    if (std::abs(areas[ci]) > std::abs(areas[outer])) outer = ci;
  for (std::size_t ci = 0; ci < areas.size(); ++ci) {
    const bool want_positive = ci == outer;
    if ((areas[ci] > 0.0) != want_positive)
      report.issues.push_back({IssueKind::Orientation, ci, 0, want_positive ? "outer component must be counter-clockwise" : "hole component must be clockwise"});
  }
  return report;
}

}  // namespace rigidity
