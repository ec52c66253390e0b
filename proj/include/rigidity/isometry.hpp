#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/flatten.hpp"
#include "rigidity/geodesic.hpp"
#include "rigidity/tolerances.hpp"

namespace rigidity {

/// f(s) = orientation * s + offset on component u -> v (wrapped modulo the
/// target length for closed components). Unit speed by construction.
struct ComponentPairing {
  std::size_t u = 0;
  std::size_t v = 0;
  int orientation = 1;
  double offset = 0.0;
};

struct BoundaryCorrespondence {
  std::vector<ComponentPairing> pairs;

  static BoundaryCorrespondence identity(const Domain& d) {
    BoundaryCorrespondence f;
    for (std::size_t c = 0; c < d.components.size(); ++c) f.pairs.push_back({c, c, 1, 0.0});
    return f;
  }

  const ComponentPairing& pairing_for(std::size_t u) const {
    for (const auto& p : pairs)
      if (p.u == u) return p;
    throw Error(ErrorKind::UnpairedComponent, "component " + std::to_string(u) + " of U is not paired");
  }

  /// Image of a, or nullopt when an open target curve ends before it.
  std::optional<BoundaryPoint> try_map(const Domain& v_domain, const BoundaryPoint& a) const {
    const auto& p = pairing_for(a.component);
    const auto& target = component_of(v_domain, {p.v, 0.0});
    const double L = component_length(target);
    double t = p.orientation * a.s + p.offset;
    if (target.closed) return BoundaryPoint{p.v, wrap_parameter(target, t)};
    const double slack = 1e-12 * std::max(L, 1.0);
    if (t < -slack || t > L + slack) return std::nullopt;
    return BoundaryPoint{p.v, std::clamp(t, 0.0, L)};
  }

  BoundaryPoint map(const Domain& v_domain, const BoundaryPoint& a) const {
    if (auto b = try_map(v_domain, a)) return *b;
    throw Error(ErrorKind::OutOfRange, "correspondence maps outside an open component");
  }

  /// f^{-1}: s = orientation * (t - offset).
  BoundaryCorrespondence inverse() const {
    BoundaryCorrespondence g;
    for (const auto& p : pairs) g.pairs.push_back({p.v, p.u, p.orientation, -p.orientation * p.offset});
    return g;
  }
};

/// Paired components have equal lengths and matching open/closed type; every
/// component on both sides is paired exactly once.
inline bool check_intrinsic_isometry(const Domain& u, const Domain& v, const BoundaryCorrespondence& f,
                                     const Tolerances& tol = default_tolerances) {
  std::vector<int> seen_u(u.components.size(), 0), seen_v(v.components.size(), 0);
  for (const auto& p : f.pairs) {
    if (p.u >= u.components.size() || p.v >= v.components.size())
      throw Error(ErrorKind::UnpairedComponent, "correspondence references a missing component");
    ++seen_u[p.u];
    ++seen_v[p.v];
  }
  for (int s : seen_u)
    if (s != 1) throw Error(ErrorKind::UnpairedComponent, "every component of U must be paired exactly once");
  for (int s : seen_v)
    if (s != 1) throw Error(ErrorKind::UnpairedComponent, "every component of V must be paired exactly once");
  const double tau_len = tol.join_rel * std::max(domain_diameter(u), domain_diameter(v));
  for (const auto& p : f.pairs) {
    if (p.orientation != 1 && p.orientation != -1) return false;
    const auto& cu = u.components[p.u];
    const auto& cv = v.components[p.v];
    if (cu.closed != cv.closed) return false;
    if (std::abs(component_length(cu) - component_length(cv)) > tau_len) return false;
  }
  return true;
}

struct IsometryReport {
  double epsilon = 0.0;
  std::size_t n_pairs = 0;
  double max_deviation = 0.0;
  double tau_iso = 0.0;
  BoundaryPoint worst_a, worst_b;    // in U
  BoundaryPoint worst_fa, worst_fb;  // their images in V
  bool pass = true;
};

struct LadderReport {
  std::vector<IsometryReport> rungs;
  bool pass = true;

  /// The first failing rung, or the largest rung when all pass.
  const IsometryReport& decisive() const {
    for (const auto& r : rungs)
      if (!r.pass) return r;
    return rungs.back();
  }
};

namespace detail {

inline std::vector<BoundaryPoint> samples_per_component(const Domain& d, std::size_t n) {
  std::vector<BoundaryPoint> pts;
  for (std::size_t c = 0; c < d.components.size(); ++c) {
    const auto s = equally_spaced(d, c, n);
    pts.insert(pts.end(), s.begin(), s.end());
  }
  return pts;
}

inline double min_component_length(const Domain& d) {
  double L = std::numeric_limits<double>::infinity();
  for (const auto& c : d.components) L = std::min(L, component_length(c));
  return L;
}

/// Pairwise metrics on both sides, computed once and reused for every epsilon.
struct PairedMetrics {
  std::vector<BoundaryPoint> a, fa;
  std::optional<BoundaryMetric> mu, mv;
  double tau_iso = 0.0;
  double clip_room = std::numeric_limits<double>::infinity();  // smallest clearance beyond the margin
};

inline PairedMetrics paired_metrics(const Domain& u, const Domain& v, const BoundaryCorrespondence& f, std::size_t n,
                                    const Tolerances& tol, std::optional<double> tau_flat) {
  if (!check_intrinsic_isometry(u, v, f, tol))
    throw Error(ErrorKind::InvalidInput, "correspondence is not an intrinsic isometry of the boundaries");
  if (n < 2) throw Error(ErrorKind::SampleCountTooSmall, "need at least two samples per component");
  PairedMetrics pm;
  // Open components are clip windows onto longer curves; a shifted map is
  // compared on the overlap of the two windows.
  for (const auto& p : samples_per_component(u, n))
    if (auto q = f.try_map(v, p)) {
      pm.a.push_back(p);
      pm.fa.push_back(*q);
    }
  if (pm.a.size() < 2) throw Error(ErrorKind::OutOfRange, "correspondence maps too few samples into V");
  pm.mu.emplace(u, pm.a, tol, tau_flat);
  pm.mv.emplace(v, pm.fa, tol, tau_flat);
  const double diam = std::max(domain_diameter(u), domain_diameter(v));
  pm.tau_iso = std::max(tol.iso_rel * diam, 3.0 * std::max(pm.mu->length_bound(), pm.mv->length_bound()));
  for (const auto* d : {&u, &v}) {
    if (!d->clip_box) continue;
    const double margin = tol.clip_margin_frac * std::min(d->clip_box->width(), d->clip_box->height());
    const auto& pts = d == &u ? pm.a : pm.fa;
    for (const auto& p : pts) pm.clip_room = std::min(pm.clip_room, d->clip_box->distance_to_edge(point_at(*d, p)) - margin);
  }
  return pm;
}

inline IsometryReport evaluate(const PairedMetrics& pm, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidInput, "epsilon must be positive");
  if (eps >= pm.clip_room)
    throw Error(ErrorKind::EpsilonTooLargeForClip, "epsilon-balls around the samples reach the clip margin");
  IsometryReport r;
  r.epsilon = eps;
  r.tau_iso = pm.tau_iso;
  const std::size_t n = pm.a.size();
  double worst = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double du = (*pm.mu)(i, j);
      if (!(du < eps)) continue;
      if (pm.mu->clip_sensitive(i, j) || pm.mv->clip_sensitive(i, j))
        throw Error(ErrorKind::ClipSensitive, "a tested pair depends on the clip box");
      ++r.n_pairs;
      const double dev = std::abs(du - (*pm.mv)(i, j));
      if (dev > worst) {
        worst = dev;
        r.worst_a = pm.a[i];
        r.worst_b = pm.a[j];
        r.worst_fa = pm.fa[i];
        r.worst_fb = pm.fa[j];
      }
    }
  r.max_deviation = std::max(worst, 0.0);
  r.pass = r.max_deviation <= r.tau_iso;
  return r;
}

}  // namespace detail

/// Compares relative distances of all sampled pairs closer than eps in U with
/// the distances of their images in V.
inline IsometryReport check_local_isometry(const Domain& u, const Domain& v, const BoundaryCorrespondence& f, double eps,
                                           std::size_t n, const Tolerances& tol = default_tolerances,
                                           std::optional<double> tau_flat = std::nullopt) {
  return detail::evaluate(detail::paired_metrics(u, v, f, n, tol, tau_flat), eps);
}

/// Default epsilon schedule {L/64, L/32, L/16, L/8}, L the shortest component of U.
inline std::vector<double> default_eps_ladder(const Domain& u) {
  const double L = detail::min_component_length(u);
  return {L / 64, L / 32, L / 16, L / 8};
}

/// Local isometry over an epsilon ladder. Pass needs every rung to pass with
/// at least one tested pair and n >= 64 samples per component.
inline LadderReport check_local_isometry_ladder(const Domain& u, const Domain& v, const BoundaryCorrespondence& f, std::size_t n,
                                                std::vector<double> ladder = {}, const Tolerances& tol = default_tolerances,
                                                std::optional<double> tau_flat = std::nullopt) {
  if (n < 64) throw Error(ErrorKind::SampleCountTooSmall, "the epsilon ladder needs at least 64 samples per component");
  if (ladder.empty()) ladder = default_eps_ladder(u);
  std::sort(ladder.begin(), ladder.end());
  const auto pm = detail::paired_metrics(u, v, f, n, tol, tau_flat);
  LadderReport out;
  for (double eps : ladder) {
    out.rungs.push_back(detail::evaluate(pm, eps));
    out.pass = out.pass && out.rungs.back().pass && out.rungs.back().n_pairs > 0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Collinearity probe.

struct ProbeViolation {
  BoundaryPoint a, b;
  Vec2 fa, fb;
  Vec2 witness;  // a point of ]f(a), f(b)[ outside cl V
};

struct ProbeReport {
  std::size_t n_pairs = 0;  // pairs with ]a,b[ inside U
  std::vector<ProbeViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// For sampled a, b within eps of w (Euclidean) whose open chord lies in U,
/// checks that the chord between the images lies in V.
inline ProbeReport collinearity_probe(const Domain& u, const Domain& v, const BoundaryCorrespondence& f, const BoundaryPoint& w,
                                      double eps, std::size_t n, const Tolerances& tol = default_tolerances) {
  if (!check_intrinsic_isometry(u, v, f, tol))
    throw Error(ErrorKind::InvalidInput, "correspondence is not an intrinsic isometry of the boundaries");
  const double diam_u = domain_diameter(u), diam_v = domain_diameter(v);
  const FlatPolygon pu = flatten(u, tol.flat_rel * diam_u);
  const FlatPolygon pv = flatten(v, tol.flat_rel * diam_v);
  const double in_u = tol.inside_rel * diam_u;
  const double in_v = tol.inside_rel * diam_v + tol.flat_rel * diam_v;
  const Vec2 center = point_at(u, w);

  std::vector<BoundaryPoint> near;
  for (const auto& p : detail::samples_per_component(u, n))
    if (distance(point_at(u, p), center) < eps && f.try_map(v, p)) near.push_back(p);

  constexpr int grid = 32;
  ProbeReport r;
  for (std::size_t i = 0; i < near.size(); ++i)
    for (std::size_t j = i + 1; j < near.size(); ++j) {
      const Vec2 a = point_at(u, near[i]), b = point_at(u, near[j]);
      bool interior = distance(a, b) > in_u;
      for (int k = 1; k <= grid && interior; ++k) interior = contains_strictly(pu, a + (b - a) * (k / (grid + 1.0)), in_u);
      if (!interior) continue;
      ++r.n_pairs;
      const auto fa = f.map(v, near[i]), fb = f.map(v, near[j]);
      const Vec2 qa = point_at(v, fa), qb = point_at(v, fb);
      for (int k = 1; k <= grid; ++k) {
        const Vec2 q = qa + (qb - qa) * (k / (grid + 1.0));
        if (!contains_closed(pv, q, in_v)) {
          r.violations.push_back({near[i], near[j], qa, qb, q});
          break;
        }
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Congruence search.

struct CongruenceResult {
  bool found = false;
  RigidMotion motion;
  double residual = std::numeric_limits<double>::infinity();
  int orientation = 1;
  std::size_t offset_index = 0;
};

namespace detail {

/// Least-squares rotation + translation taking p onto q (closed form in 2D).
inline std::pair<RigidMotion, double> procrustes(const std::vector<Vec2>& p, const std::vector<Vec2>& q, bool reflect) {
  const std::size_t m = p.size();
  Vec2 cp, cq;
  for (std::size_t i = 0; i < m; ++i) {
    cp += reflect ? Vec2{p[i].x, -p[i].y} : p[i];
    cq += q[i];
  }
  cp = cp / static_cast<double>(m);
  cq = cq / static_cast<double>(m);
  double sd = 0.0, sc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = (reflect ? Vec2{p[i].x, -p[i].y} : p[i]) - cp;
    const Vec2 b = q[i] - cq;
    sd += dot(a, b);
    sc += cross(a, b);
  }
  RigidMotion g;
  g.rotation = std::atan2(sc, sd);
  g.reflection = reflect;
  g.translation = cq - rotated(cp, g.rotation);
  double ss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 e = g.apply(p[i]) - q[i];
    ss += dot(e, e);
  }
  return {g, std::sqrt(ss / static_cast<double>(m))};
}

}  // namespace detail

/// Exhaustive search over cyclic sample offsets, both orientations and an
/// optional reflection for the rigid motion best matching U onto V.
inline CongruenceResult find_congruence(const Domain& u, const Domain& v, std::size_t m, const Tolerances& tol = default_tolerances) {
  if (m < 3) throw Error(ErrorKind::SampleCountTooSmall, "congruence search needs at least three samples");
  std::vector<Vec2> pu, pv;
  for (const auto& p : spaced_points(u, m, 0.0)) pu.push_back(point_at(u, p));
  for (const auto& p : spaced_points(v, m, 0.0)) pv.push_back(point_at(v, p));
  CongruenceResult best;
  std::vector<Vec2> q(m);
  for (int orientation : {1, -1})
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = orientation > 0 ? (i + k) % m : (k + m - i % m) % m;
        q[i] = pv[j];
      }
      for (bool reflect : {false, true}) {
        const auto [g, res] = detail::procrustes(pu, q, reflect);
        if (res < best.residual) {
          best.residual = res;
          best.motion = g;
          best.orientation = orientation;
          best.offset_index = k;
        }
      }
    }
  best.found = best.residual <= tol.congr_rel * domain_diameter(u);
  return best;
}

}  // namespace rigidity
