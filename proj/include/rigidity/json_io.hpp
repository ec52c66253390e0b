#pragma once

#include <cstddef>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rigidity/domain.hpp"
#include "rigidity/error.hpp"
#include "rigidity/geodesic.hpp"
#include "rigidity/isometry.hpp"
#include "rigidity/lemma41.hpp"
#include "rigidity/predicates.hpp"

namespace rigidity::io {

using json = nlohmann::ordered_json;

namespace detail {

inline json point(Vec2 p) { return json::array({p.x, p.y}); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw Error(ErrorKind::InvalidInput, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be a number");
  return j.get<double>();
}

inline Vec2 point_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::InvalidInput, std::string(what) + " must be [x, y]");
  return {number(j[0], what), number(j[1], what)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domains.

inline json to_json(const BoundaryPiece& piece) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        json j;
        if constexpr (std::is_same_v<T, LineSegment>) {
          j["type"] = "segment";
          j["a"] = detail::point(p.a);
          j["b"] = detail::point(p.b);
        } else if constexpr (std::is_same_v<T, CircularArc>) {
          j["type"] = "arc";
          j["center"] = detail::point(p.center);
          j["radius"] = p.radius;
          j["start_angle"] = p.start_angle;
          j["sweep"] = p.sweep;
        } else {
          j["type"] = "polyline";
          j["points"] = json::array();
          for (Vec2 q : p.points) j["points"].push_back(detail::point(q));
        }
        return j;
      },
      piece);
}

inline json to_json(const Domain& d) {
  json j;
  j["components"] = json::array();
  for (const auto& c : d.components) {
    json jc;
    jc["closed"] = c.closed;
    jc["pieces"] = json::array();
    for (const auto& p : c.pieces) jc["pieces"].push_back(to_json(p));
    j["components"].push_back(jc);
  }
  if (d.clip_box)
    j["clip_box"] = json::array({d.clip_box->xmin, d.clip_box->ymin, d.clip_box->xmax, d.clip_box->ymax});
  else
    j["clip_box"] = nullptr;
  return j;
}

inline BoundaryPiece piece_from_json(const json& j) {
  const auto& type = detail::field(j, "type");
  if (!type.is_string()) throw Error(ErrorKind::InvalidInput, "piece type must be a string");
  const auto t = type.get<std::string>();
  if (t == "segment") return LineSegment{detail::point_from(detail::field(j, "a"), "a"), detail::point_from(detail::field(j, "b"), "b")};
  if (t == "arc")
    return CircularArc{detail::point_from(detail::field(j, "center"), "center"), detail::number(detail::field(j, "radius"), "radius"),
                       detail::number(detail::field(j, "start_angle"), "start_angle"), detail::number(detail::field(j, "sweep"), "sweep")};
  if (t == "polyline") {
    const auto& pts = detail::field(j, "points");
    if (!pts.is_array()) throw Error(ErrorKind::InvalidInput, "polyline points must be an array");
    Polyline p;
    for (const auto& q : pts) p.points.push_back(detail::point_from(q, "polyline point"));
    return p;
  }
  throw Error(ErrorKind::InvalidInput, "unknown piece type '" + t + "'");
}

/// Parses the domain schema. Structural problems throw InvalidInput;
/// geometric validity is left to validate().
inline Domain domain_from_json(const json& j) {
  Domain d;
  const auto& comps = detail::field(j, "components");
  if (!comps.is_array() || comps.empty()) throw Error(ErrorKind::InvalidInput, "components must be a nonempty array");
  for (const auto& jc : comps) {
    BoundaryComponent c;
    const auto& closed = detail::field(jc, "closed");
    if (!closed.is_boolean()) throw Error(ErrorKind::InvalidInput, "closed must be a boolean");
    c.closed = closed.get<bool>();
    const auto& pieces = detail::field(jc, "pieces");
    if (!pieces.is_array() || pieces.empty()) throw Error(ErrorKind::InvalidInput, "pieces must be a nonempty array");
    for (const auto& jp : pieces) c.pieces.push_back(piece_from_json(jp));
    d.components.push_back(std::move(c));
  }
  if (j.contains("clip_box") && !j["clip_box"].is_null()) {
    const auto& b = j["clip_box"];
    if (!b.is_array() || b.size() != 4) throw Error(ErrorKind::InvalidInput, "clip_box must be [xmin, ymin, xmax, ymax] or null");
    ClipBox box{detail::number(b[0], "clip_box"), detail::number(b[1], "clip_box"), detail::number(b[2], "clip_box"),
                detail::number(b[3], "clip_box")};
    if (!(box.xmax > box.xmin && box.ymax > box.ymin)) throw Error(ErrorKind::InvalidInput, "clip_box must have positive size");
    d.clip_box = box;
  }
  return d;
}

// ---------------------------------------------------------------------------
// Correspondences and reports.

inline json to_json(const BoundaryCorrespondence& f) {
  json j;
  j["pairs"] = json::array();
  for (const auto& p : f.pairs) j["pairs"].push_back({{"u", p.u}, {"v", p.v}, {"orientation", p.orientation}, {"offset", p.offset}});
  return j;
}

inline BoundaryCorrespondence correspondence_from_json(const json& j) {
  BoundaryCorrespondence f;
  const auto& pairs = detail::field(j, "pairs");
  if (!pairs.is_array()) throw Error(ErrorKind::InvalidInput, "pairs must be an array");
  for (const auto& p : pairs) {
    const auto& u = detail::field(p, "u");
    const auto& v = detail::field(p, "v");
    const auto& o = detail::field(p, "orientation");
    if (!u.is_number_unsigned() || !v.is_number_unsigned()) throw Error(ErrorKind::InvalidInput, "u and v must be component indices");
    if (!o.is_number_integer() || (o.get<int>() != 1 && o.get<int>() != -1))
      throw Error(ErrorKind::InvalidInput, "orientation must be +1 or -1");
    f.pairs.push_back({u.get<std::size_t>(), v.get<std::size_t>(), o.get<int>(), detail::number(detail::field(p, "offset"), "offset")});
  }
  return f;
}

inline json to_json(const IsometryReport& r) {
  json j;
  j["verdict"] = r.pass ? "Pass" : "Fail";
  j["epsilon"] = r.epsilon;
  j["max_deviation"] = r.max_deviation;
  j["tau_iso"] = r.tau_iso;
  j["worst_pair"] = {{"component_u", json::array({r.worst_a.component, r.worst_b.component})},
                     {"s_u", json::array({r.worst_a.s, r.worst_b.s})},
                     {"component_v", json::array({r.worst_fa.component, r.worst_fb.component})},
                     {"s_v", json::array({r.worst_fa.s, r.worst_fb.s})}};
  j["n_pairs"] = r.n_pairs;
  return j;
}

/// Top-level fields describe the decisive rung (first failure, else the
/// largest epsilon); every rung is listed under "ladder".
inline json to_json(const LadderReport& r) {
  json j = to_json(r.decisive());
  j["verdict"] = r.pass ? "Pass" : "Fail";
  j["ladder"] = json::array();
  for (const auto& rung : r.rungs) j["ladder"].push_back(to_json(rung));
  return j;
}

inline json to_json(const CongruenceResult& c) {
  return {{"found", c.found},
          {"residual", c.residual},
          {"motion",
           {{"rotation", c.motion.rotation}, {"translation", detail::point(c.motion.translation)}, {"reflection", c.motion.reflection}}},
          {"orientation", c.orientation},
          {"offset_index", c.offset_index}};
}

inline json to_json(const SegmentDecomposition& s) {
  json j = json::array();
  for (const auto& r : s.segments)
    j.push_back({{"component", r.component}, {"s_start", r.s_start}, {"s_end", r.s_end}, {"length", r.length()}});
  return j;
}

inline json to_json(const GeodesicPath& g) {
  json w = json::array();
  for (Vec2 p : g.waypoints) w.push_back(detail::point(p));
  return {{"length", g.length}, {"length_bound", g.length_bound}, {"clip_sensitive", g.clip_sensitive}, {"waypoints", w}};
}

// ---------------------------------------------------------------------------
// Graph continuation: problem and solution.

inline json to_json(const Lemma41Problem& p) {
  json pieces = json::array();
  for (const auto& q : p.f1.pieces()) pieces.push_back({{"x0", q.x0}, {"x1", q.x1}, {"c0", q.c0}, {"c1", q.c1}, {"c2", q.c2}});
  return {{"a_star", p.f1.a_star()}, {"knots", json::array({p.x[0], p.x[1], p.x[2]})}, {"pieces", pieces}};
}

inline Lemma41Problem problem_from_json(const json& j) {
  std::vector<QuadraticPiece> pieces;
  const auto& jp = detail::field(j, "pieces");
  if (!jp.is_array()) throw Error(ErrorKind::InvalidInput, "pieces must be an array");
  for (const auto& q : jp)
    pieces.push_back({detail::number(detail::field(q, "x0"), "x0"), detail::number(detail::field(q, "x1"), "x1"),
                      detail::number(detail::field(q, "c0"), "c0"), detail::number(detail::field(q, "c1"), "c1"),
                      detail::number(detail::field(q, "c2"), "c2")});
  ConvexProfile f1(std::move(pieces));
  if (!j.contains("knots") || j["knots"].is_null()) return make_problem(std::move(f1));
  const auto& k = j["knots"];
  if (!k.is_array() || k.size() != 3) throw Error(ErrorKind::InvalidInput, "knots must be [x1, x2, x3]");
  Lemma41Problem p{std::move(f1), {detail::number(k[0], "knot"), detail::number(k[1], "knot"), detail::number(k[2], "knot")}};
  check_problem(p);
  return p;
}

inline json to_json(const JacobianReport& r) {
  json N = json::array();
  for (int i = 0; i < 3; ++i) N.push_back(json::array({r.N(i, 0), r.N(i, 1), r.N(i, 2), r.N(i, 3)}));
  return {{"N", N},
          {"singular_values", r.singular_values},
          {"rank", r.rank},
          {"kernel", json::array({r.kernel(0), r.kernel(1), r.kernel(2), r.kernel(3)})},
          {"delta1", r.delta1},
          {"delta2", r.delta2}};
}

inline json to_json(const Lemma41Solution& s, const MapReport& m) {
  const GraphCurve f2 = s.f2();
  json x = json::array(), f1v = json::array(), f2v = json::array(), phi = json::array();
  for (std::size_t i = 0; i < s.phi.x.size(); ++i) {
    x.push_back(s.phi.x[i]);
    f1v.push_back(s.problem.f1.value(s.phi.x[i]));
    f2v.push_back(f2.value(s.phi.x[i]));
    phi.push_back(s.phi.phi[i]);
  }
  json segs = json::array();
  for (const auto& g : m.segments)
    segs.push_back({{"source", json::array({g.x0, g.x1})},
                    {"image", json::array({g.y0, g.y1})},
                    {"source_length", g.source_length},
                    {"image_length", g.image_length},
                    {"deviation", g.deviation}});
  return {{"problem", to_json(s.problem)},
          {"k", s.k},
          {"delta", s.delta},
          {"residual", s.residual},
          {"residual_norm", s.residual_norm},
          {"sup_norm_diff", s.sup_norm_diff},
          {"endpoint_value_error", s.endpoint_value_error},
          {"endpoint_slope_error", s.endpoint_slope_error},
          {"min_second_difference", s.min_second_difference},
          {"jacobian", to_json(s.jacobian)},
          {"segments", segs},
          {"max_segment_deviation", m.max_deviation},
          {"max_segment_length_error", m.max_length_error},
          {"tables", {{"x", x}, {"f1", f1v}, {"f2", f2v}, {"phi", phi}}}};
}

}  // namespace rigidity::io
