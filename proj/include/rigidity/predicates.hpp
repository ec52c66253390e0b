#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/flatten.hpp"
#include "rigidity/tolerances.hpp"
#include "rigidity/validate.hpp"

namespace rigidity {

// ---------------------------------------------------------------------------
// Maximal straight sub-arcs.

/// A maximal straight sub-arc. For closed components a run that wraps past
/// s = 0 has s_end > component length.
struct StraightRun {
  std::size_t component = 0;
  double s_start = 0.0;
  double s_end = 0.0;

  double length() const { return s_end - s_start; }
};

struct SegmentDecomposition {
  std::vector<StraightRun> segments;

  bool empty() const { return segments.empty(); }
  std::size_t size() const { return segments.size(); }
};

namespace detail {

struct StraightAtom {
  double s0, s1;
  Vec2 dir;
};

/// Straight pieces in traversal order; arcs break the chain (nullopt marker).
inline std::vector<std::optional<StraightAtom>> straight_atoms(const BoundaryComponent& c) {
  std::vector<std::optional<StraightAtom>> atoms;
  const auto offs = piece_offsets(c);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const auto& piece = c.pieces[i];
    if (const auto* seg = std::get_if<LineSegment>(&piece)) {
      atoms.push_back(StraightAtom{offs[i], offs[i + 1], normalized(seg->b - seg->a)});
    } else if (const auto* poly = std::get_if<Polyline>(&piece)) {
      double acc = offs[i];
      for (std::size_t k = 1; k < poly->points.size(); ++k) {
        const double len = distance(poly->points[k - 1], poly->points[k]);
        atoms.push_back(StraightAtom{acc, acc + len, normalized(poly->points[k] - poly->points[k - 1])});
        acc += len;
      }
    } else {
      atoms.push_back(std::nullopt);
    }
  }
  return atoms;
}

}  // namespace detail

/// The set of maximal straight sub-arcs of the boundary. Consecutive straight
/// pieces whose directions agree within collinear_tol merge into one run;
/// runs shorter than the minimum length are dropped.
inline SegmentDecomposition maximal_segments(const Domain& d, double collinear_tol = default_tolerances.collinear,
                                             const Tolerances& tol = default_tolerances) {
  SegmentDecomposition out;
  const double min_len = tol.minlen_rel * domain_diameter(d);
  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& c = d.components[ci];
    const double total = component_length(c);
    const auto atoms = detail::straight_atoms(c);
    std::vector<StraightRun> runs;
    std::optional<detail::StraightAtom> current;
    Vec2 last_dir;
    for (const auto& atom : atoms) {
      if (!atom) {
        if (current) runs.push_back({ci, current->s0, current->s1});
        current.reset();
        continue;
      }
      if (current && std::abs(turn_angle(last_dir, atom->dir)) < collinear_tol) {
        current->s1 = atom->s1;
      } else {
        if (current) runs.push_back({ci, current->s0, current->s1});
        current = atom;
      }
      last_dir = atom->dir;
    }
    if (current) runs.push_back({ci, current->s0, current->s1});

    // Merge the run ending at L with the run starting at 0 across the seam.
    if (c.closed && runs.size() >= 2 && atoms.front() && atoms.back() && runs.front().s_start == 0.0 &&
        std::abs(runs.back().s_end - total) <= 1e-12 * std::max(total, 1.0) &&
        std::abs(turn_angle(atoms.back()->dir, atoms.front()->dir)) < collinear_tol) {
      runs.back().s_end = total + runs.front().s_end;
      runs.erase(runs.begin());
    }
    for (const auto& r : runs)
      if (r.length() >= min_len) out.segments.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convexity.

struct ConvexityReport {
  bool convex = false;
  bool strictly_convex = false;
  /// The domain is unbounded and the verdict refers to its clipped part.
  bool clip_dependent = false;
};

inline ConvexityReport convexity(const Domain& d, const Tolerances& tol = default_tolerances) {
  if (d.components.size() != 1) throw Error(ErrorKind::NotSimplyBounded, "convexity queries need exactly one boundary component");
  const auto& c = d.components.front();
  ConvexityReport r;
  r.clip_dependent = d.clip_box.has_value();
  bool convex = true;
  for (const auto& piece : c.pieces)
    if (const auto* arc = std::get_if<CircularArc>(&piece); arc && arc->sweep < 0.0) convex = false;
  double total_turn = 0.0;
  for (const auto& corner : junction_turns(c, 0, true)) {
    if (std::sin(corner.angle) < -tol.convex || corner.angle < -pi / 2) convex = false;
    total_turn += corner.angle;
  }
  for (const auto& piece : c.pieces)
    if (const auto* arc = std::get_if<CircularArc>(&piece)) total_turn += arc->sweep;
  if (c.closed && std::abs(total_turn - two_pi) > 1e-6) convex = false;
  r.convex = convex;
  r.strictly_convex = convex && maximal_segments(d, tol.collinear, tol).empty();
  return r;
}

inline bool is_convex(const Domain& d, const Tolerances& tol = default_tolerances) { return convexity(d, tol).convex; }
inline bool is_strictly_convex(const Domain& d, const Tolerances& tol = default_tolerances) { return convexity(d, tol).strictly_convex; }

// ---------------------------------------------------------------------------
// Tangent turning.

struct TurningReport {
  std::size_t component = 0;
  double s_start = 0.0;
  double s_end = 0.0;
  double turning = 0.0;  // total variation of the tangent angle
  double net = 0.0;      // signed change of the tangent angle
};

/// Total variation of the tangent angle on [s_start, s_end]. Smooth stretches
/// are measured as the supremum over refined partitions of the sum of
/// tangent rotations; corners inside the range add their full turn. The
/// range [0, L] of a closed component includes the seam corner.
inline TurningReport tangent_turning(const Domain& d, std::size_t component, double s_start, double s_end,
                                     const Tolerances& tol = default_tolerances) {
  const auto& c = d.components.at(component);
  const double total = component_length(c);
  if (!(s_start >= 0.0) || !(s_end <= total * (1 + 1e-15)) || !(s_start < s_end))
    throw Error(ErrorKind::OutOfRange, "turning range must satisfy 0 <= s_start < s_end <= L");
  const bool full_loop = c.closed && s_start <= 0.0 && s_end >= total * (1 - 1e-15);
  TurningReport r{component, s_start, s_end, 0.0, 0.0};

  const auto offs = piece_offsets(c);
  for (std::size_t i = 0; i < c.pieces.size(); ++i) {
    const auto* arc = std::get_if<CircularArc>(&c.pieces[i]);
    if (!arc) continue;
    const double a = std::max(s_start, offs[i]) - offs[i];
    const double b = std::min(s_end, offs[i + 1]) - offs[i];
    if (b <= a) continue;
    // Partition refinement; each chord angle is below pi so the first level is already exact.
    double prev = -1.0, value = 0.0;
    for (std::size_t m = 4; m <= (1u << 16); m *= 2) {
      value = 0.0;
      Vec2 t0 = piece_tangent(c.pieces[i], a);
      for (std::size_t k = 1; k <= m; ++k) {
        const Vec2 t1 = piece_tangent(c.pieces[i], a + (b - a) * static_cast<double>(k) / static_cast<double>(m));
        value += std::abs(turn_angle(t0, t1));
        t0 = t1;
      }
      if (prev >= 0.0 && std::abs(value - prev) < tol.turn * 1e-3) break;
      prev = value;
    }
    r.turning += value;
    r.net += (arc->sweep >= 0.0 ? 1.0 : -1.0) * value;
  }
  for (const auto& corner : junction_turns(c, component, true)) {
    const bool inside = full_loop || (corner.s > s_start && corner.s < s_end);
    if (!inside) continue;
    r.turning += std::abs(corner.angle);
    r.net += corner.angle;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Supporting segment.

struct SupportingSegment {
  Vec2 a;
  Vec2 b;
  Vec2 contact;
  BoundaryPoint contact_point;
  Vec2 direction;
  double resolution = 0.0;  // flattening sag used by the search
};

namespace detail {

/// Distance along the ray from polygon vertex v until it leaves the closed polygon.
inline std::optional<double> ray_exit(const FlatPolygon& poly, std::size_t v, Vec2 dir, double inside_tol) {
  const Vec2 p = poly.vertices[v];
  std::vector<double> ts;
  const double diam = std::max(poly.diameter, 1e-300);
  for (const auto& [first, last] : poly.rings) {
    for (std::size_t i = first; i < last; ++i) {
      const Vec2 a = poly.vertices[i];
      const Vec2 b = poly.vertices[i + 1 == last ? first : i + 1];
      const Vec2 e = b - a;
      const double denom = cross(dir, e);
      if (std::abs(denom) < 1e-14 * norm(e)) {
        if (std::abs(cross(a - p, dir)) <= inside_tol) {
          ts.push_back(dot(a - p, dir));
          ts.push_back(dot(b - p, dir));
        }
        continue;
      }
      const double t = cross(a - p, e) / denom;
      const double u = cross(a - p, dir) / denom;
      if (u >= -1e-12 && u <= 1 + 1e-12) ts.push_back(t);
    }
  }
  const double t_min = 1e-12 * diam;
  std::vector<double> pos;
  for (double t : ts)
    if (t > t_min) pos.push_back(t);
  std::sort(pos.begin(), pos.end());
  double prev = 0.0;
  pos.push_back((pos.empty() ? 0.0 : pos.back()) + diam + 1.0);
  for (double t : pos) {
    if (t - prev <= t_min) continue;
    const Vec2 mid = p + dir * (0.5 * (prev + t));
    if (!contains_closed(poly, mid, inside_tol)) {
      if (prev <= t_min) return std::nullopt;
      return prev;
    }
    prev = t;
  }
  return std::nullopt;
}

}  // namespace detail

/// Finds a chord lying inside the domain except for one boundary point P in
/// its interior, where it supports the boundary from inside. Candidates are
/// concave arcs (contact at the arc midpoint, tangent direction) followed by
/// reflex corners in boundary order (direction = sum of the two tangents).
inline SupportingSegment supporting_segment(const Domain& d, const Tolerances& tol = default_tolerances) {
  if (d.clip_box) throw Error(ErrorKind::InvalidInput, "supporting segment search needs a bounded domain");
  if (d.components.size() == 1 && is_convex(d, tol)) throw Error(ErrorKind::ConvexDomain, "convex domain has no supporting segment");

  const double diam = domain_diameter(d);
  const double tau_flat = tol.flat_rel * diam;
  const double inside_tol = tol.inside_rel * diam;

  struct Candidate {
    BoundaryPoint at;
    Vec2 dir;
  };
  std::vector<Candidate> candidates;
  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& c = d.components[ci];
    const auto offs = piece_offsets(c);
    for (std::size_t i = 0; i < c.pieces.size(); ++i) {
      const auto* arc = std::get_if<CircularArc>(&c.pieces[i]);
      if (!arc || arc->sweep >= 0.0) continue;
      const double s = offs[i] + 0.5 * piece_length(c.pieces[i]);
      candidates.push_back({{ci, s}, component_tangent(c, s)});
    }
  }
  for (std::size_t ci = 0; ci < d.components.size(); ++ci) {
    const auto& c = d.components[ci];
    for (const auto& corner : junction_turns(c, ci, true)) {
      if (std::sin(corner.angle) >= -tol.convex && corner.angle > -pi / 2) continue;
      const Vec2 t_out = component_tangent(c, corner.s);
      const Vec2 t_in = rotated(t_out, -corner.angle);
      const Vec2 sum = t_in + t_out;
      if (norm(sum) < 1e-9) continue;  // cusp
      candidates.push_back({{ci, corner.s}, normalized(sum)});
    }
  }

  for (const auto& cand : candidates) {
    const FlatPolygon poly = flatten(d, tau_flat, {cand.at});
    const std::size_t v = poly.required.front();
    const auto fwd = detail::ray_exit(poly, v, cand.dir, inside_tol);
    const auto bwd = detail::ray_exit(poly, v, -cand.dir, inside_tol);
    if (!fwd || !bwd) continue;
    const Vec2 p = poly.vertices[v];
    const Vec2 a = p - cand.dir * *bwd;
    const Vec2 b = p + cand.dir * *fwd;
    const double len = distance(a, b);
    bool ok = true;
    constexpr int grid = 64;
    for (int k = 1; k <= grid && ok; ++k) {
      const Vec2 q = a + (b - a) * (static_cast<double>(k) / (grid + 1));
      if (distance(q, p) < 0.02 * len) continue;
      ok = contains_strictly(poly, q, inside_tol);
    }
    if (!ok) continue;
    return {a, b, p, cand.at, cand.dir, tau_flat};
  }
  throw Error(ErrorKind::SearchFailed, "no supporting segment found at flattening sag " + std::to_string(tau_flat));
}

}  // namespace rigidity
