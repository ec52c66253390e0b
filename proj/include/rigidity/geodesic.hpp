#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/flatten.hpp"
#include "rigidity/tolerances.hpp"

namespace rigidity {

struct GeodesicPath {
  std::vector<Vec2> waypoints;
  double length = 0.0;
  /// How much length may exceed the exact geodesic because of flattening.
  double length_bound = 0.0;
  /// Path or endpoints come closer than the safety margin to the clip box.
  bool clip_sensitive = false;
};

/// Visibility graph over the reflex vertices of a flattened domain plus a set
/// of terminal points. Terminals are either polygon vertices or free points
/// strictly inside the polygon.
class VisibilityGraph {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  struct Node {
    Vec2 p;
    std::size_t vertex = npos;
  };

  VisibilityGraph(FlatPolygon poly, const std::vector<std::size_t>& terminal_vertices, const std::vector<Vec2>& free_points,
                  double inside_tol)
      : poly_(std::move(poly)), eps_(inside_tol) {
    std::vector<std::size_t> node_of_vertex(poly_.size(), npos);
    auto add_vertex_node = [&](std::size_t v) {
      if (node_of_vertex[v] == npos) {
        node_of_vertex[v] = nodes_.size();
        nodes_.push_back({poly_.vertices[v], v});
      }
      return node_of_vertex[v];
    };
    for (std::size_t v : terminal_vertices) terminals_.push_back(add_vertex_node(v));
    for (Vec2 p : free_points) {
      terminals_.push_back(nodes_.size());
      nodes_.push_back({p, npos});
    }
    reflex_.assign(poly_.size(), false);
    for (std::size_t v = 0; v < poly_.size(); ++v) {
      if (poly_.is_reflex(v, 1e-12)) {
        reflex_[v] = true;
        add_vertex_node(v);
      }
    }
    build_edges();
    const std::size_t n = nodes_.size();
    weight_.assign(n * n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
      weight_[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (visible(i, j)) {
          const double w = distance(nodes_[i].p, nodes_[j].p);
          weight_[i * n + j] = w;
          weight_[j * n + i] = w;
        }
      }
    }
  }

  const FlatPolygon& polygon() const { return poly_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t terminal(std::size_t k) const { return terminals_.at(k); }
  std::size_t terminal_count() const { return terminals_.size(); }

  struct Tree {
    std::vector<double> dist;
    std::vector<std::size_t> prev;
  };

  /// Dense Dijkstra (the graph is close to complete).
  Tree shortest_paths(std::size_t source) const {
    const std::size_t n = nodes_.size();
    Tree t{std::vector<double>(n, std::numeric_limits<double>::infinity()), std::vector<std::size_t>(n, npos)};
    std::vector<bool> done(n, false);
    t.dist[source] = 0.0;
    for (std::size_t iter = 0; iter < n; ++iter) {
      std::size_t u = npos;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i)
        if (!done[i] && t.dist[i] < best) {
          best = t.dist[i];
          u = i;
        }
      if (u == npos) break;
      done[u] = true;
      const double* row = &weight_[u * n];
      for (std::size_t v = 0; v < n; ++v) {
        if (done[v]) continue;
        const double cand = best + row[v];
        if (cand < t.dist[v]) {
          t.dist[v] = cand;
          t.prev[v] = u;
        }
      }
    }
    return t;
  }

  /// Waypoints from source to target; reflex vertices touched by a straight
  /// leg are inserted so every bend is listed.
  std::vector<Vec2> waypoints(const Tree& tree, std::size_t source, std::size_t target) const {
    std::vector<Vec2> rev;
    for (std::size_t u = target; u != npos; u = tree.prev[u]) {
      rev.push_back(nodes_[u].p);
      if (u == source) break;
    }
    std::reverse(rev.begin(), rev.end());
    std::vector<Vec2> out;
    for (std::size_t k = 0; k < rev.size(); ++k) {
      out.push_back(rev[k]);
      if (k + 1 == rev.size()) break;
      const Vec2 a = rev[k], b = rev[k + 1];
      const double len = distance(a, b);
      if (len == 0.0) continue;
      const Vec2 dn = (b - a) / len;
      std::vector<std::pair<double, Vec2>> touched;
      for (std::size_t v = 0; v < poly_.size(); ++v) {
        if (!reflex_[v]) continue;
        const Vec2 w = poly_.vertices[v];
        const double t = dot(w - a, dn);
        if (t <= eps_ || t >= len - eps_) continue;
        if (std::abs(cross(dn, w - a)) <= eps_) touched.push_back({t, w});
      }
      std::sort(touched.begin(), touched.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& tw : touched) out.push_back(tw.second);
    }
    return out;
  }

  bool visible(std::size_t i, std::size_t j) const { return segment_visible(nodes_[i], nodes_[j]); }

 private:
  struct EdgeBox {
    std::size_t a, b;
    double xmin, ymin, xmax, ymax;
  };

  void build_edges() {
    for (const auto& [first, last] : poly_.rings)
      for (std::size_t i = first; i < last; ++i) {
        const std::size_t j = i + 1 == last ? first : i + 1;
        const Vec2 p = poly_.vertices[i], q = poly_.vertices[j];
        edges_.push_back({i, j, std::min(p.x, q.x), std::min(p.y, q.y), std::max(p.x, q.x), std::max(p.y, q.y)});
      }
  }

  /// Closed interior cone test at vertex v for unit direction d.
  bool in_cone(std::size_t v, Vec2 d) const {
    const Vec2 p = poly_.vertices[v];
    const Vec2 out = normalized(poly_.vertices[poly_.next(v)] - p);
    const Vec2 back = normalized(poly_.vertices[poly_.prev(v)] - p);
    constexpr double ang = 1e-10;
    if (cross(out, back) > 0.0) return cross(out, d) >= -ang && cross(d, back) >= -ang;
    // Reflex or straight: reject only directions strictly inside the exterior wedge.
    return !(cross(back, d) > ang && cross(d, out) > ang);
  }

  bool segment_visible(const Node& na, const Node& nb) const {
    const Vec2 pa = na.p, pb = nb.p;
    const double len = distance(pa, pb);
    if (len <= eps_) return true;
    const Vec2 dn = (pb - pa) / len;
    if (na.vertex != npos && !in_cone(na.vertex, dn)) return false;
    if (nb.vertex != npos && !in_cone(nb.vertex, -dn)) return false;
    const double xmin = std::min(pa.x, pb.x) - eps_, xmax = std::max(pa.x, pb.x) + eps_;
    const double ymin = std::min(pa.y, pb.y) - eps_, ymax = std::max(pa.y, pb.y) + eps_;
    for (const auto& e : edges_) {
      if (e.xmax < xmin || e.xmin > xmax || e.ymax < ymin || e.ymin > ymax) continue;
      if (e.a == na.vertex || e.b == na.vertex || e.a == nb.vertex || e.b == nb.vertex) continue;
      const Vec2 a = poly_.vertices[e.a], b = poly_.vertices[e.b];
      const double o1 = cross(dn, a - pa), o2 = cross(dn, b - pa);
      if (!((o1 > eps_ && o2 < -eps_) || (o1 < -eps_ && o2 > eps_))) continue;
      const double el = distance(a, b);
      const Vec2 en = (b - a) / el;
      const double o3 = cross(en, pa - a), o4 = cross(en, pb - a);
      if ((o3 > eps_ && o4 < -eps_) || (o3 < -eps_ && o4 > eps_)) return false;
    }
    // Vertices lying on the open segment: the segment must pass through their interior cone.
    for (const auto& e : edges_) {
      const std::size_t v = e.a;
      if (v == na.vertex || v == nb.vertex) continue;
      const Vec2 w = poly_.vertices[v];
      if (w.x < xmin || w.x > xmax || w.y < ymin || w.y > ymax) continue;
      if (std::abs(cross(dn, w - pa)) > eps_) continue;
      const double t = dot(w - pa, dn);
      if (t <= eps_ || t >= len - eps_) continue;
      if (!in_cone(v, dn) || !in_cone(v, -dn)) return false;
    }
    return true;
  }

  FlatPolygon poly_;
  double eps_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> terminals_;
  std::vector<bool> reflex_;
  std::vector<EdgeBox> edges_;
  std::vector<double> weight_;
};

namespace detail {

inline double clip_margin(const FlatPolygon& poly, const Tolerances& tol) {
  if (!poly.clip_box) return 0.0;
  return tol.clip_margin_frac * std::min(poly.clip_box->width(), poly.clip_box->height());
}

inline bool path_clip_sensitive(const FlatPolygon& poly, const std::vector<Vec2>& waypoints, const Tolerances& tol) {
  if (!poly.clip_box) return false;
  const double margin = clip_margin(poly, tol);
  // Distance to the box boundary is concave inside the box, so vertices suffice.
  for (Vec2 w : waypoints)
    if (poly.clip_box->distance_to_edge(w) < margin) return true;
  return false;
}

}  // namespace detail

/// Relative metric between a fixed set of boundary points, computed once on
/// a shared visibility graph. Immutable after construction.
class BoundaryMetric {
 public:
  BoundaryMetric(const Domain& d, std::vector<BoundaryPoint> points, const Tolerances& tol = default_tolerances,
                 std::optional<double> tau_flat = std::nullopt)
      : points_(std::move(points)), tol_(tol) {
    const double diam = domain_diameter(d);
    const double flat = tau_flat.value_or(tol.flat_rel * diam);
    FlatPolygon poly = flatten(d, flat, points_);
    const auto terminals = poly.required;
    graph_.emplace(std::move(poly), terminals, std::vector<Vec2>{}, tol.inside_rel * diam);
    const std::size_t n = points_.size();
    dist_.assign(n * n, 0.0);
    sensitive_.assign(n * n, false);
    trees_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src = graph_->terminal(i);
      trees_.push_back(graph_->shortest_paths(src));
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dij = trees_[i].dist[graph_->terminal(j)];
        if (!std::isfinite(dij)) throw Error(ErrorKind::InvalidInput, "boundary points are not connected inside the domain");
        dist_[i * n + j] = dij;
      }
    }
    // Symmetrize exactly: both directions are the same undirected shortest path problem.
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double v = std::min(dist_[i * n + j], dist_[j * n + i]);
        dist_[i * n + j] = dist_[j * n + i] = v;
        const bool s = graph_->polygon().clip_box && detail::path_clip_sensitive(graph_->polygon(), path(i, j).waypoints, tol_);
        sensitive_[i * n + j] = sensitive_[j * n + i] = s;
      }
    for (std::size_t i = 0; i < n; ++i)
      if (graph_->polygon().clip_box)
        sensitive_[i * n + i] = graph_->polygon().clip_box->distance_to_edge(graph_->nodes()[graph_->terminal(i)].p) <
                                detail::clip_margin(graph_->polygon(), tol_);
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<BoundaryPoint>& points() const { return points_; }
  double operator()(std::size_t i, std::size_t j) const { return dist_[i * points_.size() + j]; }
  bool clip_sensitive(std::size_t i, std::size_t j) const { return sensitive_[i * points_.size() + j]; }
  double length_bound() const { return graph_->polygon().length_bound; }
  const VisibilityGraph& graph() const { return *graph_; }

  GeodesicPath path(std::size_t i, std::size_t j) const {
    GeodesicPath g;
    g.waypoints = graph_->waypoints(trees_[i], graph_->terminal(i), graph_->terminal(j));
    g.length = trees_[i].dist[graph_->terminal(j)];
    g.length_bound = length_bound();
    g.clip_sensitive = detail::path_clip_sensitive(graph_->polygon(), g.waypoints, tol_);
    return g;
  }

 private:
  std::vector<BoundaryPoint> points_;
  Tolerances tol_;
  std::optional<VisibilityGraph> graph_;
  std::vector<VisibilityGraph::Tree> trees_;
  std::vector<double> dist_;
  std::vector<bool> sensitive_;
};

/// Shortest path in the closure of the domain between two arbitrary points
/// of the closure (boundary or interior).
inline GeodesicPath geodesic(const Domain& d, Vec2 p, Vec2 q, const Tolerances& tol = default_tolerances,
                             std::optional<double> tau_flat = std::nullopt) {
  const double diam = domain_diameter(d);
  const double flat = tau_flat.value_or(tol.flat_rel * diam);
  const double inside_tol = tol.inside_rel * diam;
  FlatPolygon poly = flatten(d, flat);

  if (distance(p, q) == 0.0) {
    if (!contains_closed(poly, p, flat + inside_tol)) throw Error(ErrorKind::PointOutsideClosure, "query point outside the domain closure");
    GeodesicPath g{{p, q}, 0.0, poly.length_bound, detail::path_clip_sensitive(poly, {p}, tol)};
    if (g.clip_sensitive) throw Error(ErrorKind::ClipSensitive, "query point within the clip margin");
    return g;
  }

  std::vector<std::size_t> terminals;
  std::vector<Vec2> free_points;
  std::vector<bool> is_free;
  for (Vec2 x : {p, q}) {
    std::size_t vertex = VisibilityGraph::npos;
    for (std::size_t v = 0; v < poly.size() && vertex == VisibilityGraph::npos; ++v)
      if (distance(poly.vertices[v], x) <= inside_tol) vertex = v;
    if (vertex == VisibilityGraph::npos) {
      // Snap onto the nearest edge when within the flattening sag.
      double best = std::numeric_limits<double>::infinity();
      std::size_t best_edge = 0;
      for (std::size_t v = 0; v < poly.size(); ++v) {
        const double dd = segment_distance(x, poly.vertices[v], poly.vertices[poly.next(v)]);
        if (dd < best) {
          best = dd;
          best_edge = v;
        }
      }
      if (best <= flat + inside_tol) {
        vertex = poly.insert_on_edge(best_edge, x);
        for (auto& t : terminals)
          if (t >= vertex) ++t;
      }
    }
    if (vertex != VisibilityGraph::npos) {
      terminals.push_back(vertex);
      is_free.push_back(false);
    } else if (contains_closed(poly, x, inside_tol)) {
      free_points.push_back(x);
      is_free.push_back(true);
    } else {
      throw Error(ErrorKind::PointOutsideClosure, "query point outside the domain closure");
    }
  }

  const double bound = poly.length_bound;
  const bool clipped = poly.clip_box.has_value();
  const FlatPolygon poly_copy = clipped ? poly : FlatPolygon{};
  VisibilityGraph graph(std::move(poly), terminals, free_points, inside_tol);
  // Terminals come first (vertex terminals, then free points); map p and q.
  std::size_t vi = 0, fi = terminals.size();
  const std::size_t np = is_free[0] ? graph.terminal(fi++) : graph.terminal(vi++);
  const std::size_t nq = is_free[1] ? graph.terminal(fi++) : graph.terminal(vi++);
  const auto tree = graph.shortest_paths(np);
  if (!std::isfinite(tree.dist[nq])) throw Error(ErrorKind::InvalidInput, "query points are not connected inside the domain");

  GeodesicPath g;
  g.waypoints = graph.waypoints(tree, np, nq);
  g.length = tree.dist[nq];
  g.length_bound = bound;
  g.clip_sensitive = clipped && detail::path_clip_sensitive(poly_copy, g.waypoints, tol);
  if (g.clip_sensitive) throw Error(ErrorKind::ClipSensitive, "geodesic comes within the clip margin");
  return g;
}

inline double relative_distance(const Domain& d, const BoundaryPoint& a, const BoundaryPoint& b, const Tolerances& tol = default_tolerances) {
  const BoundaryMetric m(d, {a, b}, tol);
  if (m.clip_sensitive(0, 1) || m.clip_sensitive(0, 0) || m.clip_sensitive(1, 1))
    throw Error(ErrorKind::ClipSensitive, "relative distance depends on the clip box");
  return m(0, 1);
}

inline GeodesicPath boundary_geodesic(const Domain& d, const BoundaryPoint& a, const BoundaryPoint& b, const Tolerances& tol = default_tolerances) {
  const BoundaryMetric m(d, {a, b}, tol);
  auto g = m.path(0, 1);
  if (g.clip_sensitive || m.clip_sensitive(0, 0) || m.clip_sensitive(1, 1))
    throw Error(ErrorKind::ClipSensitive, "geodesic comes within the clip margin");
  return g;
}

// ---------------------------------------------------------------------------
// Metric samples.

struct MetricSample {
  std::vector<BoundaryPoint> points;
  std::vector<std::vector<double>> D;
  double length_bound = 0.0;
};

/// n boundary points equally spaced in total arc length (components
/// concatenated in order) starting at offset.
inline std::vector<BoundaryPoint> spaced_points(const Domain& d, std::size_t n, double offset) {
  if (d.components.size() == 1) return equally_spaced(d, 0, n, offset);
  double total = 0.0;
  std::vector<double> lengths;
  for (const auto& c : d.components) {
    lengths.push_back(component_length(c));
    total += lengths.back();
  }
  std::vector<BoundaryPoint> pts;
  for (std::size_t i = 0; i < n; ++i) {
    double s = offset + total * static_cast<double>(i) / static_cast<double>(n);
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    std::size_t c = 0;
    while (c + 1 < lengths.size() && s >= lengths[c]) {
      s -= lengths[c];
      ++c;
    }
    pts.push_back({c, wrap_parameter(d.components[c], s)});
  }
  return pts;
}

inline MetricSample metric_matrix(const Domain& d, std::size_t n, double seed_offset = 0.0, const Tolerances& tol = default_tolerances) {
  if (n < 2) throw Error(ErrorKind::InvalidInput, "metric_matrix needs at least two points");
  const BoundaryMetric m(d, spaced_points(d, n, seed_offset), tol);
  MetricSample out;
  out.points = m.points();
  out.length_bound = m.length_bound();
  out.D.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (m.clip_sensitive(i, j)) throw Error(ErrorKind::ClipSensitive, "metric sample depends on the clip box");
      out.D[i][j] = m(i, j);
    }
  return out;
}

/// Writes the sample as CSV: a header of arc-length parameters, then the rows.
inline void write_csv(std::ostream& os, const MetricSample& m) {
  char buf[64];
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", m.points[i].s);
    os << (i ? "," : "") << buf;
  }
  os << '\n';
  for (const auto& row : m.D) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", row[j]);
      os << (j ? "," : "") << buf;
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Triangle probe.

enum class TriangleKind { Equality, StrictInequality };

struct TriangleVerdict {
  TriangleKind kind = TriangleKind::StrictInequality;
  double gap = 0.0;
  /// c lies on the computed geodesic from a to b.
  bool certified = false;
};

inline TriangleVerdict triangle_probe(const Domain& d, const BoundaryPoint& a, const BoundaryPoint& c, const BoundaryPoint& b,
                                      double tau_eq, const Tolerances& tol = default_tolerances) {
  const BoundaryMetric m(d, {a, c, b}, tol);
  TriangleVerdict v;
  v.gap = std::max(0.0, m(0, 1) + m(1, 2) - m(0, 2));
  v.kind = v.gap <= tau_eq ? TriangleKind::Equality : TriangleKind::StrictInequality;
  const auto path = m.path(0, 2);
  const Vec2 pc = point_at(d, c);
  const double inside_tol = tol.inside_rel * domain_diameter(d);
  for (std::size_t k = 0; k + 1 < path.waypoints.size() && !v.certified; ++k)
    v.certified = segment_distance(pc, path.waypoints[k], path.waypoints[k + 1]) <= inside_tol;
  return v;
}

}  // namespace rigidity
