#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/geodesic.hpp"
#include "rigidity/isometry.hpp"
#include "rigidity/predicates.hpp"
#include "rigidity/tolerances.hpp"
#include "rigidity/validate.hpp"

namespace rigidity {

enum class Provenance { Step5, Deformation, Lemma41 };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::Step5: return "step5";
    case Provenance::Deformation: return "deformation";
    case Provenance::Lemma41: return "lemma41";
  }
  return "unknown";
}

struct CounterexamplePair {
  Domain u;
  Domain v;
  BoundaryCorrespondence f;
  Provenance provenance = Provenance::Step5;
};

// ---------------------------------------------------------------------------
// Unbounded convex domain with a flat piece, and its bent copy.

struct Step5Pair : CounterexamplePair {
  double replaced_length = 0.0;  // |[(-l,0),(0,0)]|
  double arc_length = 0.0;       // quarter circle of radius 2l/pi
  Vec2 p;                        // (-2l/pi, 2l/pi)
};

/// U: the half-strip model below the x-axis whose boundary contains the
/// maximal segment [(-2l,0),(2l,0)], rounded by quarter circles of radius l
/// and continued by short vertical rays (length l/4). The ray length keeps
/// the default epsilon ladder (up to L/8) below l, the radius within which
/// the bent copy is a local isometry.
inline Step5Pair step5_pair(double l, std::optional<ClipBox> clip = std::nullopt, const Tolerances& tol = default_tolerances) {
  if (!(l > 0.0)) throw Error(ErrorKind::InvalidInput, "l must be positive");
  const ClipBox box = clip.value_or(ClipBox{-10 * l, -10 * l, 10 * l, 10 * l});
  const double ray = l / 4;

  const BoundaryPiece right_ray = LineSegment{{3 * l, -l - ray}, {3 * l, -l}};
  const BoundaryPiece right_arc = CircularArc{{2 * l, -l}, l, 0.0, pi / 2};
  const BoundaryPiece fixed_top = LineSegment{{2 * l, 0}, {0, 0}};
  const BoundaryPiece replaced = LineSegment{{0, 0}, {-l, 0}};
  const BoundaryPiece left_top = LineSegment{{-l, 0}, {-2 * l, 0}};
  const BoundaryPiece left_arc = CircularArc{{-2 * l, -l}, l, pi / 2, pi / 2};
  const BoundaryPiece left_ray = LineSegment{{-3 * l, -l}, {-3 * l, -l - ray}};

  Step5Pair out;
  out.provenance = Provenance::Step5;
  out.u.components.push_back({{right_ray, right_arc, fixed_top, replaced, left_top, left_arc, left_ray}, false});
  out.u.clip_box = box;

  const double rho = 2 * l / pi;
  out.p = {-rho, rho};
  // Quarter circle from (0,0) to P, turning right (the domain stays outside the disk).
  const CircularArc quarter{{0, rho}, rho, -pi / 2, -pi / 2};
  // Translation by ((1 - 2/pi) l, 2l/pi), then rotation by -pi/2 about P.
  RigidMotion move;
  move.rotation = -pi / 2;
  move.translation = rotated(Vec2{(1 - 2 / pi) * l, rho} - out.p, -pi / 2) + out.p;
  out.v.components.push_back(
      {{right_ray, right_arc, fixed_top, quarter, transformed(left_top, move), transformed(left_arc, move), transformed(left_ray, move)}, false});
  out.v.clip_box = box;
  out.f = BoundaryCorrespondence::identity(out.u);
  out.replaced_length = piece_length(replaced);
  out.arc_length = piece_length(quarter);

  const double margin = tol.clip_margin_frac * std::min(box.width(), box.height());
  const double room = component_length(out.u.components[0]) / 8;
  for (const auto* d : {&out.u, &out.v})
    for (Vec2 q : dense_samples(d->components[0], l / 64))
      if (!box.contains(q) || box.distance_to_edge(q) < margin + room)
        throw Error(ErrorKind::ClipTooSmall, "clip box does not contain the construction with its margin");
  return out;
}

// ---------------------------------------------------------------------------
// Nonconvex deformation: replace a strictly curved sub-arc near the contact
// point of a supporting segment by another convex arc of the same length.

struct DeformationPair : CounterexamplePair {
  Vec2 contact;
  double radius = 0.0;            // disk K around the contact point
  double s_start = 0.0, s_end = 0.0;  // replaced sub-arc of U
  double amplitude = 0.0;         // amplitude actually used
  double shape = 0.0;             // second-bump weight restoring the length
};

namespace detail {

/// C^1 cubic bump of half-width w centred at c (1 at the centre, 0 with zero slope at c +- w).
inline double cubic_bump(double t, double c, double w) {
  const double x = std::abs(t - c) / w;
  return x >= 1.0 ? 0.0 : 1.0 - 3.0 * x * x + 2.0 * x * x * x;
}

/// Parameter of the first boundary point (walking in direction dir from s0)
/// whose projection onto e reaches |target|; nullopt when the projection
/// stops being monotone first.
inline std::optional<double> walk_to_projection(const BoundaryComponent& c, double s0, int dir, Vec2 origin, Vec2 e, double target,
                                                double step) {
  const double L = component_length(c);
  auto proj = [&](double s) { return std::abs(dot(component_point(c, wrap_parameter(c, s)) - origin, e)); };
  double prev = 0.0, s = s0;
  for (int k = 0; k < 100000; ++k) {
    const double sn = s + dir * step;
    if (std::abs(sn - s0) > L / 2) return std::nullopt;
    const double pn = proj(sn);
    if (pn + 1e-15 < prev) return std::nullopt;
    if (pn >= target) {
      double lo = s, hi = sn;
      for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * std::max(1.0, L); ++it) {
        const double mid = 0.5 * (lo + hi);
        (proj(mid) < target ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev = pn;
    s = sn;
  }
  return std::nullopt;
}

}  // namespace detail

/// Builds the deformed partner of a bounded non-convex domain. amplitude is
/// the initial bump size; it is halved until the new arc is convex, inside K
/// and yields a valid boundary.
inline DeformationPair nonconvex_deformation(const Domain& u, double amplitude, const Tolerances& tol = default_tolerances) {
  if (u.components.size() != 1 || !u.components[0].closed || u.clip_box)
    throw Error(ErrorKind::InvalidInput, "deformation needs a bounded domain with one closed boundary component");
  if (is_convex(u, tol)) throw Error(ErrorKind::ConvexDomain, "convex domains admit no deformation");
  const auto support = supporting_segment(u, tol);
  const auto& comp = u.components[0];
  const double L = component_length(comp);
  const double diam = domain_diameter(u);
  const Vec2 P = support.contact;
  const Vec2 e = support.direction;
  const double sP = support.contact_point.s;
  const Vec2 n_in = perp(tangent_at(u, support.contact_point));

  DeformationPair out;
  out.provenance = Provenance::Deformation;
  out.u = u;
  out.contact = P;

  // Shrink the disk until the configuration is admissible.
  double d = 0.05 * diam;
  std::optional<std::pair<double, double>> star;
  for (int attempt = 0; attempt < 40 && !star; ++attempt, d *= 0.5) {
    const double step = d / 256;
    const auto sa = detail::walk_to_projection(comp, sP, -1, P, e, d, step);
    const auto sb = detail::walk_to_projection(comp, sP, +1, P, e, d, step);
    if (!sa || !sb) continue;
    const double r = 2 * d;
    // The lesser arc lambda between L and S lies in K and on the far side of I.
    bool ok = true;
    for (int k = 0; k <= 256 && ok; ++k) {
      const double s = *sa + (*sb - *sa) * k / 256.0;
      const Vec2 x = component_point(comp, wrap_parameter(comp, s));
      if (distance(x, P) >= r) ok = false;
      if (std::abs(dot(x - P, e)) > 1e-3 * d && dot(x - P, n_in) >= 0.0) ok = false;
    }
    if (!ok) continue;
    // The shortest curve in cl U from L to S is the boundary arc itself.
    const BoundaryPoint bl{0, wrap_parameter(comp, *sa)}, bs{0, wrap_parameter(comp, *sb)};
    const BoundaryMetric m(u, {bl, bs}, tol);
    if (std::abs(m(0, 1) - (*sb - *sa)) > 3 * m.length_bound() + tol.iso_rel * diam) continue;
    // mu*: between the points at half the offset. The boundary must be
    // strictly curved on mu* and a little beyond, so the welds sit inside
    // the curved part.
    const auto sa2 = detail::walk_to_projection(comp, sP, -1, P, e, d / 2, step / 2);
    const auto sb2 = detail::walk_to_projection(comp, sP, +1, P, e, d / 2, step / 2);
    if (!sa2 || !sb2) continue;
    const double pad = 0.05 * (*sb2 - *sa2);
    const double ca = *sa2 - pad, cb = *sb2 + pad;
    double prev_angle = angle_of(component_tangent(comp, wrap_parameter(comp, ca)));
    bool curved = true;
    for (int k = 1; k <= 64 && curved; ++k) {
      const double s = ca + (cb - ca) * k / 64.0;
      const double a = angle_of(component_tangent(comp, wrap_parameter(comp, s)));
      double turn = a - prev_angle;
      turn = std::remainder(turn, two_pi);
      if (!(turn < -1e-12)) curved = false;  // right turns: curved toward U
      prev_angle = a;
    }
    if (!curved) continue;
    out.radius = r;
    star = {*sa2, *sb2};
  }
  if (!star) throw Error(ErrorKind::DeformationDegenerate, "no admissible disk around the contact point");
  double s0 = star->first, s1 = star->second;
  if (s0 < 0.0 || s1 > L) {
    // Keep the replaced arc away from the parametrization seam.
    throw Error(ErrorKind::DeformationDegenerate, "replaced arc crosses the start of the boundary parametrization");
  }
  out.s_start = s0;
  out.s_end = s1;
  const double ell = s1 - s0;

  if (amplitude == 0.0) {
    out.v = u;
    out.f = BoundaryCorrespondence::identity(u);
    return out;
  }

  // Parameter grid on [0,1], graded toward both welds so the end chords
  // follow the weld tangents within the turn tolerance.
  const double turning = tangent_turning(u, 0, s0, s1, tol).turning;
  std::vector<double> grid;
  const int uniform = 64;
  double first = std::min(1.0 / uniform, 0.25 * tol.turn / std::max(turning, 1e-12));
  std::vector<double> head;
  for (double t = first; t < 1.0 / uniform; t *= 2) head.push_back(t);
  grid.push_back(0.0);
  for (double t : head) grid.push_back(t);
  for (int k = 1; k < uniform; ++k) grid.push_back(static_cast<double>(k) / uniform);
  for (auto it = head.rbegin(); it != head.rend(); ++it) grid.push_back(1.0 - *it);
  grid.push_back(1.0);

  std::vector<Vec2> base, normal;
  for (double t : grid) {
    const double s = s0 + t * ell;
    base.push_back(component_point(comp, std::min(s, L)));
    normal.push_back(perp(component_tangent(comp, std::min(s, L))));
  }
  base.front() = component_point(comp, s0);
  base.back() = component_point(comp, s1);

  auto curve = [&](double a, double c) {
    std::vector<Vec2> q(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double h = detail::cubic_bump(grid[k], 1.0 / 3, 1.0 / 3) - c * detail::cubic_bump(grid[k], 2.0 / 3, 1.0 / 3);
      q[k] = base[k] + normal[k] * (a * h);
    }
    q.front() = base.front();
    q.back() = base.back();
    return q;
  };
  auto length = [](const std::vector<Vec2>& q) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) acc += distance(q[k], q[k + 1]);
    return acc;
  };

  const std::size_t corners_u = validate(u, tol).corners.size();
  for (int rung = 0; rung < 40; ++rung) {
    const double a = amplitude / std::pow(2.0, rung);
    // Bracket and bisect the shape parameter so the new arc has length ell.
    auto g = [&](double c) { return length(curve(a, c)) - ell; };
    double lo = 1.0, hi = 1.0;
    bool bracketed = false;
    for (double span = 0.25; span <= 16.0 && !bracketed; span *= 2) {
      lo = 1.0 - span;
      hi = 1.0 + span;
      bracketed = (g(lo) <= 0.0) != (g(hi) <= 0.0);
    }
    if (!bracketed) continue;
    const bool lo_neg = g(lo) <= 0.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      ((g(mid) <= 0.0) == lo_neg ? lo : hi) = mid;
      if (hi - lo < 1e-16) break;
    }
    const double c = 0.5 * (lo + hi);
    const auto q = curve(a, c);
    if (std::abs(length(q) - ell) > 1e-13 * L) continue;

    // Convex toward U (right turns only) and inside K.
    bool ok = true;
    for (std::size_t k = 1; k + 1 < q.size() && ok; ++k) ok = cross(q[k] - q[k - 1], q[k + 1] - q[k]) < 0.0;
    for (Vec2 x : q) ok = ok && distance(x, P) <= out.radius;
    if (!ok) continue;

    BoundaryComponent vc;
    vc.closed = true;
    vc.pieces = sub_pieces(comp, 0.0, s0);
    vc.pieces.push_back(Polyline{q});
    for (auto& piece : sub_pieces(comp, s1, L)) vc.pieces.push_back(piece);
    Domain v{{vc}, std::nullopt};
    const auto report = validate(v, tol);
    if (!report.valid() || report.corners.size() != corners_u) continue;
    out.v = std::move(v);
    out.f = BoundaryCorrespondence::identity(u);
    out.amplitude = a;
    out.shape = c;
    if (!check_intrinsic_isometry(out.u, out.v, out.f, tol)) continue;
    return out;
  }
  throw Error(ErrorKind::DeformationDegenerate, "amplitude ladder exhausted without a valid convex replacement arc");
}

// ---------------------------------------------------------------------------
// Modified cardioid profile: r = 1 - sin(phi) in the (x, z) half-plane x >= 0,
// welded at (sqrt5/9, 2/9) to the circle x^2 + (z - 1)^2 = 2/3.

struct CardioidProfile {
  BoundaryComponent profile;  // open curve from (0,-2) to (0, 1 - sqrt(2/3))
  Domain domain;              // profile closed along the axis x = 0
  Vec2 junction;
  double slope_cardioid = 0.0;  // dz/dx at the junction, cardioid side
  double slope_circle = 0.0;    // dz/dx at the junction, circle side
  std::size_t samples = 0;
};

inline Vec2 cardioid_point(double phi) {
  const double r = 1.0 - std::sin(phi);
  return {r * std::cos(phi), r * std::sin(phi)};
}

/// Implicit equation of the cardioid.
inline double cardioid_equation(Vec2 p) {
  const double rr = p.x * p.x + p.y * p.y;
  return rr - std::sqrt(rr) + p.y;
}

/// Lower circle z = 1 - sqrt(2/3 - x^2), written as an implicit residual.
inline double weld_circle_equation(Vec2 p) { return p.y - (1.0 - std::sqrt(2.0 / 3.0 - p.x * p.x)); }

inline CardioidProfile cardioid_profile(double tau_flat) {
  if (!(tau_flat > 0.0)) throw Error(ErrorKind::InvalidInput, "flattening tolerance must be positive");
  const double phi0 = -pi / 2, phi1 = std::asin(2.0 / 3.0);
  CardioidProfile out;
  out.junction = {std::sqrt(5.0) / 9.0, 2.0 / 9.0};

  // Double the sample count until every chord sags at most tau_flat.
  std::size_t n = 16;
  std::vector<Vec2> pts;
  for (; n < (std::size_t{1} << 22); n *= 2) {
    pts.clear();
    double worst = 0.0;
    for (std::size_t k = 0; k <= n; ++k) pts.push_back(cardioid_point(phi0 + (phi1 - phi0) * static_cast<double>(k) / static_cast<double>(n)));
    for (std::size_t k = 0; k < n; ++k) {
      const Vec2 mid = cardioid_point(phi0 + (phi1 - phi0) * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
      const Vec2 a = pts[k], b = pts[k + 1];
      worst = std::max(worst, std::abs(cross(normalized(b - a), mid - a)));
    }
    if (worst <= tau_flat) break;
  }
  pts.back() = out.junction;
  out.samples = pts.size();

  const Vec2 center{0.0, 1.0};
  const double rc = std::sqrt(2.0 / 3.0);
  const double start = angle_of(out.junction - center);
  const CircularArc weld{center, rc, start, -pi / 2 - start};

  // One-sided slopes from the exact parametrizations.
  const double s = std::sin(phi1), c = std::cos(phi1), r = 1.0 - s, dr = -c;
  const double dx = dr * c - r * s, dz = dr * s + r * c;
  out.slope_cardioid = dz / dx;
  const Vec2 t = piece_tangent(weld, 0.0);
  out.slope_circle = t.y / t.x;

  out.profile.closed = false;
  out.profile.pieces = {Polyline{pts}, weld};
  BoundaryComponent closed = out.profile;
  closed.closed = true;
  closed.pieces.push_back(LineSegment{piece_end(weld), {0.0, -2.0}});
  out.domain.components = {closed};
  return out;
}

/// Surface of revolution of a profile (x >= 0 is the radius, y is the height)
/// about the vertical axis, as ASCII STL. Degenerate triangles on the axis
/// are skipped.
inline void revolve_export(std::ostream& os, const BoundaryComponent& profile, std::size_t segments = 128, double arc_step = 1e-2) {
  std::vector<Vec2> pts;
  for (const auto& piece : profile.pieces) {
    if (const auto* poly = std::get_if<Polyline>(&piece)) {
      pts.insert(pts.end(), poly->points.begin(), poly->points.end() - 1);
    } else {
      const double len = piece_length(piece);
      const int n = std::max(1, static_cast<int>(std::ceil(len / arc_step)));
      for (int k = 0; k < n; ++k) pts.push_back(piece_point(piece, len * k / n));
    }
  }
  pts.push_back(piece_end(profile.pieces.back()));

  struct V3 {
    double x, y, z;
  };
  auto ring_point = [&](Vec2 p, std::size_t j) {
    const double a = two_pi * static_cast<double>(j) / static_cast<double>(segments);
    return V3{p.x * std::cos(a), p.x * std::sin(a), p.y};
  };
  auto sub = [](V3 a, V3 b) { return V3{a.x - b.x, a.y - b.y, a.z - b.z}; };
  auto crs = [](V3 a, V3 b) { return V3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x}; };
  char buf[256];
  auto facet = [&](V3 a, V3 b, V3 c) {
    V3 nrm = crs(sub(b, a), sub(c, a));
    const double len = std::sqrt(nrm.x * nrm.x + nrm.y * nrm.y + nrm.z * nrm.z);
    if (len <= 1e-15) return;
    nrm = {nrm.x / len, nrm.y / len, nrm.z / len};
    std::snprintf(buf, sizeof buf, "  facet normal %.9g %.9g %.9g\n    outer loop\n", nrm.x, nrm.y, nrm.z);
    os << buf;
    for (V3 p : {a, b, c}) {
      std::snprintf(buf, sizeof buf, "      vertex %.9g %.9g %.9g\n", p.x, p.y, p.z);
      os << buf;
    }
    os << "    endloop\n  endfacet\n";
  };
  os << "solid profile\n";
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    for (std::size_t j = 0; j < segments; ++j) {
      const V3 a = ring_point(pts[i], j), b = ring_point(pts[i], j + 1);
      const V3 c = ring_point(pts[i + 1], j), d = ring_point(pts[i + 1], j + 1);
      facet(a, b, d);
      facet(a, d, c);
    }
  os << "endsolid profile\n";
}

}  // namespace rigidity
