#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rigidity/error.hpp"
#include "rigidity/quadrature.hpp"
#include "rigidity/vec2.hpp"

namespace rigidity {

// ---------------------------------------------------------------------------
// f1 model: C^1 convex increasing curve made of quadratic pieces
// c0 + c1 t + c2 t^2 (t = x - x0). Pieces with c2 == 0 are the straight
// segments of the graph.

struct QuadraticPiece {
  double x0 = 0.0, x1 = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

class ConvexProfile {
 public:
  ConvexProfile() = default;

  explicit ConvexProfile(std::vector<QuadraticPiece> pieces) : pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw Error(ErrorKind::InvalidInput, "profile needs at least one piece");
    if (pieces_.front().x0 != 0.0) throw Error(ErrorKind::InvalidInput, "profile must start at x = 0");
    const double scale = std::max(1.0, pieces_.back().x1);
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const auto& p = pieces_[i];
      if (!(p.x1 > p.x0)) throw Error(ErrorKind::InvalidInput, "profile pieces must have positive width");
      if (p.c2 < 0.0) throw Error(ErrorKind::InvalidInput, "profile pieces must be convex");
      if (i == 0) continue;
      const auto& q = pieces_[i - 1];
      const double w = q.x1 - q.x0;
      if (std::abs(q.x1 - p.x0) > 1e-14 * scale) throw Error(ErrorKind::InvalidInput, "profile pieces must be contiguous");
      if (std::abs(q.c0 + q.c1 * w + q.c2 * w * w - p.c0) > 1e-12 * scale ||
          std::abs(q.c1 + 2 * q.c2 * w - p.c1) > 1e-12 * scale)
        throw Error(ErrorKind::InvalidInput, "profile pieces must join with matching value and slope");
    }
    if (value(0.0) != 0.0 || slope(0.0) != 0.0) throw Error(ErrorKind::InvalidInput, "profile needs f(0) = f'(0) = 0");
    if (!(pieces_.front().c2 > 0.0)) throw Error(ErrorKind::InvalidInput, "profile must be strictly increasing");
  }

  double a_star() const { return pieces_.back().x1; }
  const std::vector<QuadraticPiece>& pieces() const { return pieces_; }

  double value(double x) const {
    const auto& p = piece(x);
    const double t = x - p.x0;
    return p.c0 + p.c1 * t + p.c2 * t * t;
  }
  double slope(double x) const {
    const auto& p = piece(x);
    return p.c1 + 2 * p.c2 * (x - p.x0);
  }

  std::vector<double> breakpoints() const {
    std::vector<double> b;
    for (const auto& p : pieces_) b.push_back(p.x0);
    b.push_back(a_star());
    return b;
  }

  /// Straight segments of the graph as x-intervals.
  std::vector<std::pair<double, double>> segments() const {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pieces_)
      if (p.c2 == 0.0) out.emplace_back(p.x0, p.x1);
    return out;
  }

  std::vector<double> segment_left_endpoints() const {
    std::vector<double> out;
    for (const auto& s : segments()) out.push_back(s.first);
    return out;
  }

  /// Index of the piece containing x (right-continuous; a* belongs to the last piece).
  std::size_t locate(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x, [](double v, const QuadraticPiece& p) { return v < p.x0; });
    if (it == pieces_.begin()) return 0;
    return static_cast<std::size_t>(it - pieces_.begin()) - 1;
  }

 private:
  const QuadraticPiece& piece(double x) const { return pieces_[locate(x)]; }

  std::vector<QuadraticPiece> pieces_;
};

/// Graph of a function on [0, a*] for arc-length bookkeeping.
struct GraphCurve {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::vector<double> breakpoints;  // slope is smooth between consecutive entries
  double a_star = 0.0;
};

inline GraphCurve graph_of(const ConvexProfile& f1) {
  return {[f1](double x) { return f1.value(x); }, [f1](double x) { return f1.slope(x); }, f1.breakpoints(), f1.a_star()};
}

/// Random f1 with alternating fillets and segments: a wide first fillet, then
/// 5-7 (segment, fillet) pairs, ending inside a fillet.
inline ConvexProfile random_convex_profile(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> first_w(0.8, 1.2), fillet_w(0.05, 0.25), seg_w(0.05, 0.2), curv(0.3, 1.5);
  const int n = std::uniform_int_distribution<int>(5, 7)(rng);
  std::vector<QuadraticPiece> pieces;
  double x = 0, v = 0, s = 0;
  auto add = [&](double w, double c2) {
    pieces.push_back({x, x + w, v, s, c2});
    v += s * w + c2 * w * w;
    s += 2 * c2 * w;
    x += w;
  };
  for (int i = 0; i < n; ++i) {
    const double w = i == 0 ? first_w(rng) : fillet_w(rng);
    add(w, curv(rng));
    add(seg_w(rng), 0.0);
  }
  add(seg_w(rng), curv(rng));
  return ConvexProfile(std::move(pieces));
}

// ---------------------------------------------------------------------------
// Problem, knots and residual.

struct Lemma41Problem {
  ConvexProfile f1;
  std::array<double, 3> x{};  // knots x1 < x2 < x3
};

struct Lemma41Tolerances {
  double res = 1e-10;   // residuals, endpoint conditions, phi endpoints
  double quad = 1e-12;  // absolute quadrature error
  double rank = 1e-8;   // relative singular-value threshold
};

/// a* - x3 < f1(x3) / f1'(x3): makes the minor over columns {3,4} nonzero.
inline bool tail_condition(const ConvexProfile& f1, double x3) {
  return f1.a_star() - x3 < f1.value(x3) / f1.slope(x3);
}
/// x2 - x1 < f1(x1) / f1'(x1): makes the minor over columns {1,2} nonzero.
inline bool head_condition(const ConvexProfile& f1, double x1, double x2) {
  return x2 - x1 < f1.value(x1) / f1.slope(x1);
}

/// Default knots: x3 the largest segment left endpoint satisfying the tail
/// condition and f1'(x3) < f1'(a*), x1 the first left endpoint, x2 the next
/// one after x1 satisfying the head condition and below x3.
inline std::optional<std::array<double, 3>> select_knots(const ConvexProfile& f1) {
  const auto left = f1.segment_left_endpoints();
  const double A = f1.a_star();
  std::optional<double> x3;
  for (double x : left)
    if (x > 0 && x < A && tail_condition(f1, x) && f1.slope(x) < f1.slope(A)) x3 = x;
  if (!x3 || left.empty()) return std::nullopt;
  const double x1 = left.front();
  if (!(x1 > 0)) return std::nullopt;
  for (double x : left)
    if (x > x1 && x < *x3 && head_condition(f1, x1, x)) return std::array<double, 3>{x1, x, *x3};
  return std::nullopt;
}

inline Lemma41Problem make_problem(ConvexProfile f1) {
  const auto knots = select_knots(f1);
  if (!knots) throw Error(ErrorKind::InvalidInput, "no segment left endpoints satisfy the knot conditions");
  return {std::move(f1), *knots};
}

inline Lemma41Problem random_lemma41_problem(std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    ConvexProfile f1 = random_convex_profile(rng);
    if (auto knots = select_knots(f1)) return {std::move(f1), *knots};
  }
  throw Error(ErrorKind::SearchFailed, "random profile generator found no admissible knots");
}

inline void check_problem(const Lemma41Problem& p) {
  const auto& x = p.x;
  if (!(0 < x[0] && x[0] < x[1] && x[1] < x[2] && x[2] < p.f1.a_star()))
    throw Error(ErrorKind::InvalidInput, "knots must satisfy 0 < x1 < x2 < x3 < a*");
}

namespace detail {

/// Knot abscissae x_0 = 0, x_1..x_3, x_4 = a*.
inline std::array<double, 5> knot_grid(const Lemma41Problem& p) { return {0.0, p.x[0], p.x[1], p.x[2], p.f1.a_star()}; }

/// Knot interval index j (0..3) with x_j <= t, right-continuous.
inline int knot_interval(const std::array<double, 5>& X, double t) {
  int j = 0;
  while (j < 3 && t >= X[j + 1]) ++j;
  return j;
}

inline std::vector<double> merged_breakpoints(const Lemma41Problem& p) {
  auto b = p.f1.breakpoints();
  b.insert(b.end(), p.x.begin(), p.x.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

}  // namespace detail

/// f2 of the four-case display for the given k.
inline GraphCurve lemma41_f2(const Lemma41Problem& p, const std::array<double, 4>& k) {
  const auto X = detail::knot_grid(p);
  const ConvexProfile f1 = p.f1;
  auto value = [f1, X, k](double x) {
    const int j = detail::knot_interval(X, x);
    double v = k[j] * f1.value(x);
    for (int s = 1; s <= j; ++s) v += (k[s - 1] - k[s]) * (f1.value(X[s]) + f1.slope(X[s]) * (x - X[s]));
    return v;
  };
  auto slope = [f1, X, k](double x) {
    const int j = detail::knot_interval(X, x);
    double v = k[j] * f1.slope(x);
    for (int s = 1; s <= j; ++s) v += (k[s - 1] - k[s]) * f1.slope(X[s]);
    return v;
  };
  return {value, slope, detail::merged_breakpoints(p), p.f1.a_star()};
}

/// Left-hand sides of the system in the row order of N: arc-length equality
/// L(f1) - L(f2), then f2(a*) - f1(a*), then f2'(a*) - f1'(a*), the last two
/// written in the knot expansion.
inline std::array<double, 3> lemma41_residual(const Lemma41Problem& p, const std::array<double, 4>& k,
                                              const Lemma41Tolerances& tol = {}) {
  check_problem(p);
  for (double v : k)
    if (!(v > 0)) throw Error(ErrorKind::InvalidInput, "k must be componentwise positive");
  const auto X = detail::knot_grid(p);
  const auto& f1 = p.f1;
  const double A = X[4];
  const auto bps = detail::merged_breakpoints(p);
  const GraphCurve f2 = lemma41_f2(p, k);

  const double L1 = quadrature([&](double t) { return std::hypot(1.0, f1.slope(t)); }, 0.0, A, bps, tol.quad / 2);
  const double L2 = quadrature([&](double t) { return std::hypot(1.0, f2.slope(t)); }, 0.0, A, bps, tol.quad / 2);

  double r41 = (k[3] - 1) * f1.value(A), r42 = (k[3] - 1) * f1.slope(A);
  for (int s = 1; s <= 3; ++s) {
    r41 += (k[s - 1] - k[s]) * (f1.value(X[s]) + f1.slope(X[s]) * (A - X[s]));
    r42 += (k[s - 1] - k[s]) * f1.slope(X[s]);
  }
  return {L1 - L2, r41, r42};
}

/// Jacobian of lemma41_residual at an arbitrary k (used by the corrector).
inline Eigen::Matrix<double, 3, 4> residual_jacobian(const Lemma41Problem& p, const std::array<double, 4>& k,
                                                     const Lemma41Tolerances& tol = {}) {
  const auto X = detail::knot_grid(p);
  const auto& f1 = p.f1;
  const double A = X[4];
  const GraphCurve f2 = lemma41_f2(p, k);
  const auto bps = detail::merged_breakpoints(p);
  auto fp_knot = [&](int s) { return s == 0 ? 0.0 : f1.slope(X[s]); };

  Eigen::Matrix<double, 3, 4> J;
  for (int s = 1; s <= 4; ++s) {
    // d g / d k_s on knot interval j: 0 if j+1 < s, f1'(t) - f1'(x_{s-1}) if j+1 == s,
    // f1'(x_s) - f1'(x_{s-1}) otherwise.
    auto dg = [&](double t) {
      const int j = detail::knot_interval(X, t);
      if (j + 1 < s) return 0.0;
      if (j + 1 == s) return f1.slope(t) - fp_knot(s - 1);
      return fp_knot(s) - fp_knot(s - 1);
    };
    J(0, s - 1) = -quadrature([&](double t) { const double g = f2.slope(t); return g * dg(t) / std::hypot(1.0, g); },
                              X[s - 1], A, bps, tol.quad);
    auto tangent_at_A = [&](int m) { return m == 4 ? f1.value(A) : f1.value(X[m]) + f1.slope(X[m]) * (A - X[m]); };
    auto slope_at = [&](int m) { return m == 4 ? f1.slope(A) : f1.slope(X[m]); };
    J(1, s - 1) = tangent_at_A(s) - (s == 1 ? 0.0 : tangent_at_A(s - 1));
    J(2, s - 1) = slope_at(s) - (s == 1 ? 0.0 : slope_at(s - 1));
  }
  return J;
}

struct JacobianReport {
  Eigen::Matrix<double, 3, 4> N;
  std::array<double, 4> singular_values{};  // descending; the padded fourth is the kernel
  int rank = 0;
  Eigen::Vector4d kernel;                    // unit right singular vector of the smallest value
  std::array<double, 4> u{}, v{};            // u_i, v_i at x_1..x_3, a*
  double delta1 = 0.0, delta2 = 0.0;         // minors over columns {3,4} and {1,2} of the summed matrix
};

/// N = (A_js) at k = (1,1,1,1) from the closed/integral entries.
inline JacobianReport lemma41_jacobian(const Lemma41Problem& p, const Lemma41Tolerances& tol = {}) {
  check_problem(p);
  const auto X = detail::knot_grid(p);
  const auto& f1 = p.f1;
  const double A = X[4];
  const auto bps = detail::merged_breakpoints(p);
  auto fp = [&](double t) { return f1.slope(t); };
  auto w = [&](double t) { return std::hypot(1.0, fp(t)); };

  JacobianReport r;
  for (int i = 1; i <= 4; ++i) {
    r.u[i - 1] = quadrature([&](double t) { return fp(t) * fp(t) / w(t); }, 0.0, X[i], bps, tol.quad);
    r.v[i - 1] = quadrature([&](double t) { return fp(t) / w(t); }, X[i], A, bps, tol.quad);
  }

  auto& N = r.N;
  N(0, 0) = -r.u[0] - fp(X[1]) * r.v[0];
  for (int s = 2; s <= 4; ++s) {
    const double base = fp(X[s - 1]);
    const double curved = quadrature([&](double t) { return fp(t) * (fp(t) - base) / w(t); }, X[s - 1], X[s], bps, tol.quad);
    const double tail = s == 4 ? 0.0 : (fp(X[s]) - base) * r.v[s - 1];
    N(0, s - 1) = -curved - tail;
  }
  auto at = [&](int m) { return f1.value(X[m]) + (A - X[m]) * fp(X[m]); };
  N(1, 0) = at(1);
  N(1, 1) = at(2) - at(1);
  N(1, 2) = at(3) - at(2);
  N(1, 3) = f1.value(A) - f1.value(X[3]) - (A - X[3]) * fp(X[3]);
  N(2, 0) = fp(X[1]);
  N(2, 1) = fp(X[2]) - fp(X[1]);
  N(2, 2) = fp(X[3]) - fp(X[2]);
  N(2, 3) = fp(A) - fp(X[3]);

  // Pad to 4x4 so the kernel direction comes out of the same decomposition.
  Eigen::Matrix4d padded = Eigen::Matrix4d::Zero();
  padded.topRows<3>() = N;
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(padded, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  for (int i = 0; i < 4; ++i) r.singular_values[i] = sv(i);
  for (int i = 0; i < 4; ++i)
    if (sv(i) > tol.rank * sv(0)) ++r.rank;
  r.kernel = svd.matrixV().col(3);
  int big = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(r.kernel(i)) > std::abs(r.kernel(big))) big = i;
  if (r.kernel(big) < 0) r.kernel = -r.kernel;

  r.delta1 = at(3) * fp(A) - f1.value(A) * fp(X[3]);
  r.delta2 = at(1) * fp(X[2]) - fp(X[1]) * at(2);
  return r;
}

// ---------------------------------------------------------------------------
// Arc length tables, phi and the map F.

/// Cumulative arc length of a graph on a uniform grid, with exact
/// (quadrature-based) evaluation and inversion between grid nodes.
class ArcLength {
 public:
  ArcLength(GraphCurve c, std::size_t n, double tau_quad = default_tau_quad) : c_(std::move(c)), tau_(tau_quad) {
    if (n < 2) throw Error(ErrorKind::InvalidInput, "arc-length table needs two nodes");
    h_ = c_.a_star / static_cast<double>(n - 1);
    x_.resize(n);
    s_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) x_[i] = i + 1 == n ? c_.a_star : h_ * static_cast<double>(i);
    for (std::size_t i = 1; i < n; ++i) s_[i] = s_[i - 1] + segment(x_[i - 1], x_[i]);
  }

  double total() const { return s_.back(); }
  double speed(double x) const { return std::hypot(1.0, c_.slope(x)); }

  double operator()(double x) const {
    x = std::clamp(x, 0.0, c_.a_star);
    const std::size_t i = std::min(static_cast<std::size_t>(x / h_), x_.size() - 2);
    return s_[i] + segment(x_[i], x);
  }

  /// x with arc length s from 0; s is clamped to [0, total].
  double inverse(double s) const {
    if (s <= 0) return 0.0;
    if (s >= total()) return c_.a_star;
    const std::size_t i = static_cast<std::size_t>(std::upper_bound(s_.begin(), s_.end(), s) - s_.begin()) - 1;
    double lo = x_[i], hi = x_[i + 1];
    double y = lo + (s - s_[i]) / speed(lo);
    for (int it = 0; it < 100; ++it) {
      if (!(y > lo && y < hi)) y = 0.5 * (lo + hi);
      const double F = s_[i] + segment(x_[i], y) - s;
      if (F > 0) hi = y; else lo = y;
      if (std::abs(F) <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, total()) || hi - lo <= 1e-16 * c_.a_star) break;
      y -= F / speed(y);
    }
    return y;
  }

  const GraphCurve& curve() const { return c_; }

 private:
  double segment(double a, double b) const {
    return quadrature([&](double t) { return std::hypot(1.0, c_.slope(t)); }, a, b, c_.breakpoints, tau_);
  }

  GraphCurve c_;
  double tau_;
  double h_ = 0.0;
  std::vector<double> x_, s_;
};

struct PhiTable {
  std::vector<double> x, phi;  // phi(x) solves the arc-length functional equation
  double length_f1 = 0.0, length_f2 = 0.0;
};

/// phi by cumulative arc-length matching on n uniform samples of [0, a*].
inline PhiTable lemma41_phi(const GraphCurve& f1, const GraphCurve& f2, std::size_t n = 2048, const Lemma41Tolerances& tol = {}) {
  if (std::abs(f1.a_star - f2.a_star) > tol.res) throw Error(ErrorKind::InvalidInput, "curves must share [0, a*]");
  const ArcLength s1(f1, n, tol.quad), s2(f2, n, tol.quad);
  PhiTable t;
  t.length_f1 = s1.total();
  t.length_f2 = s2.total();
  if (std::abs(t.length_f1 - t.length_f2) > tol.res) throw Error(ErrorKind::ArcLengthMismatch, "graphs have different total arc length");
  t.x.resize(n);
  t.phi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.x[i] = i + 1 == n ? f2.a_star : f2.a_star * static_cast<double>(i) / static_cast<double>(n - 1);
    t.phi[i] = s1.inverse(s2(t.x[i]));
  }
  return t;
}

struct SegmentImage {
  double x0 = 0.0, x1 = 0.0;        // source segment of Gamma_1 (abscissae)
  double y0 = 0.0, y1 = 0.0;        // abscissae of its image on Gamma_2
  double source_length = 0.0;       // Euclidean length of the source segment
  double image_length = 0.0;        // chord of the image
  double deviation = 0.0;           // max distance of the image from its chord
};

struct MapReport {
  std::vector<std::pair<Vec2, Vec2>> samples;  // (point of Gamma_1, its image F on Gamma_2)
  std::vector<SegmentImage> segments;
  double max_deviation = 0.0;
  double max_length_error = 0.0;
};

/// Samples F from the phi table and checks every straight segment of Gamma_1.
inline MapReport lemma41_map(const ConvexProfile& f1, const GraphCurve& f2, const PhiTable& phi, int per_segment = 65,
                             const Lemma41Tolerances& tol = {}) {
  MapReport r;
  for (std::size_t i = 0; i < phi.x.size(); ++i) {
    const double u = phi.phi[i], x = phi.x[i];
    r.samples.push_back({{u, f1.value(u)}, {x, f2.value(x)}});
  }
  const std::size_t n = std::max<std::size_t>(phi.x.size(), 2);
  const ArcLength s1(graph_of(f1), n, tol.quad), s2(f2, n, tol.quad);
  for (const auto& [a, b] : f1.segments()) {
    SegmentImage im;
    im.x0 = a;
    im.x1 = b;
    im.y0 = s2.inverse(s1(a));
    im.y1 = s2.inverse(s1(b));
    const Vec2 pa{im.y0, f2.value(im.y0)}, pb{im.y1, f2.value(im.y1)};
    im.source_length = distance(Vec2{a, f1.value(a)}, Vec2{b, f1.value(b)});
    im.image_length = distance(pa, pb);
    const Vec2 dir = normalized(pb - pa);
    for (int k = 1; k < per_segment - 1; ++k) {
      const double y = im.y0 + (im.y1 - im.y0) * k / (per_segment - 1);
      im.deviation = std::max(im.deviation, std::abs(cross(dir, Vec2{y, f2.value(y)} - pa)));
    }
    r.max_deviation = std::max(r.max_deviation, im.deviation);
    r.max_length_error = std::max(r.max_length_error, std::abs(im.image_length - im.source_length));
    r.segments.push_back(im);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Continuation from (1,1,1,1).

struct Lemma41Options {
  double delta = 1e-2;                                         // predictor step along the kernel
  double eps_target = std::numeric_limits<double>::infinity(); // bound on |f2 - f1|_sup
  int max_halvings = 30;
  int convexity_grid = 10000;
  std::size_t table_size = 2048;
  Lemma41Tolerances tol{};
};

struct Lemma41Solution {
  Lemma41Problem problem;
  std::array<double, 4> k{1, 1, 1, 1};
  std::array<double, 3> residual{};
  double residual_norm = 0.0;  // max abs
  double delta = 0.0;          // predictor step finally accepted
  int newton_iterations = 0;
  double sup_norm_diff = 0.0;
  double endpoint_value_error = 0.0, endpoint_slope_error = 0.0;
  double min_second_difference = 0.0;
  JacobianReport jacobian;
  PhiTable phi;

  GraphCurve f2() const { return lemma41_f2(problem, k); }
};

namespace detail {

/// Exact max |f2 - f1|: the difference is quadratic between merged breakpoints.
inline double sup_norm_diff(const Lemma41Problem& p, const GraphCurve& f2) {
  const auto bps = merged_breakpoints(p);
  auto D = [&](double x) { return f2.value(x) - p.f1.value(x); };
  auto Dp = [&](double x) { return f2.slope(x) - p.f1.slope(x); };
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
    const double a = bps[i], b = bps[i + 1];
    m = std::max({m, std::abs(D(a)), std::abs(D(b))});
    // Evaluate slopes just inside the interval (the pieces are right-continuous).
    const double da = Dp(a), db = Dp(b - 1e-12 * (b - a)) ;
    if ((da < 0) != (db < 0) && da != db) {
      const double x = a + da * (b - a) / (da - db);
      if (x > a && x < b) m = std::max(m, std::abs(D(x)));
    }
  }
  return m;
}

}  // namespace detail

inline Lemma41Solution lemma41_solve(const Lemma41Problem& p, const Lemma41Options& opt = {}) {
  check_problem(p);
  const auto& tol = opt.tol;
  if (!tail_condition(p.f1, p.x[2]) || !head_condition(p.f1, p.x[0], p.x[1]) || !(p.f1.slope(p.x[2]) < p.f1.slope(p.f1.a_star())))
    throw Error(ErrorKind::RankDeficient, "knots violate the rank conditions; rank 3 is not certified");
  Lemma41Solution sol;
  sol.problem = p;
  sol.jacobian = lemma41_jacobian(p, tol);
  if (sol.jacobian.rank < 3) throw Error(ErrorKind::RankDeficient, "Jacobian at (1,1,1,1) has rank below 3");
  const Eigen::Vector4d n = sol.jacobian.kernel;
  const double A = p.f1.a_star();

  auto finish = [&](const std::array<double, 4>& k) {
    sol.k = k;
    sol.residual = lemma41_residual(p, k, tol);
    sol.residual_norm = 0.0;
    for (double r : sol.residual) sol.residual_norm = std::max(sol.residual_norm, std::abs(r));
    const GraphCurve f2 = sol.f2();
    sol.sup_norm_diff = detail::sup_norm_diff(p, f2);
    sol.endpoint_value_error = std::abs(f2.value(A) - p.f1.value(A));
    sol.endpoint_slope_error = std::abs(f2.slope(A) - p.f1.slope(A));
    sol.min_second_difference = std::numeric_limits<double>::infinity();
    const int m = opt.convexity_grid;
    for (int i = 1; i < m; ++i) {
      const double h = A / m;
      const double d2 = f2.value(h * (i - 1)) - 2 * f2.value(h * i) + f2.value(h * (i + 1));
      sol.min_second_difference = std::min(sol.min_second_difference, d2);
    }
  };
  auto admissible = [&]() {
    bool ok = sol.residual_norm <= tol.res && sol.min_second_difference >= -tol.res && sol.sup_norm_diff <= opt.eps_target &&
              sol.endpoint_value_error <= tol.res && sol.endpoint_slope_error <= tol.res;
    for (double v : sol.k) ok = ok && v > 0;
    // Strictly increasing: f2' is nondecreasing and vanishes only at 0.
    const GraphCurve f2 = sol.f2();
    return ok && f2.slope(A / opt.convexity_grid) > 0;
  };

  if (opt.delta == 0.0) {
    finish({1, 1, 1, 1});
    sol.phi = lemma41_phi(graph_of(p.f1), sol.f2(), opt.table_size, tol);
    return sol;
  }

  bool converged_once = false;
  double delta = opt.delta;
  for (int attempt = 0; attempt <= opt.max_halvings; ++attempt, delta *= 0.5) {
    Eigen::Vector4d k = Eigen::Vector4d::Ones() + delta * n;
    if ((k.array() <= 0).any()) continue;
    bool converged = false;
    int it = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (; it < 50; ++it) {
      const std::array<double, 4> ka{k(0), k(1), k(2), k(3)};
      const auto r = lemma41_residual(p, ka, tol);
      const double norm = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
      if (norm <= 1e-2 * tol.res || (norm <= tol.res && norm >= prev * 0.5)) {
        converged = true;
        break;
      }
      prev = norm;
      Eigen::Matrix4d M;
      M.topRows<3>() = residual_jacobian(p, ka, tol);
      M.row(3) = n.transpose();
      const Eigen::Vector4d rhs(-r[0], -r[1], -r[2], 0.0);
      k += M.fullPivLu().solve(rhs);
      if ((k.array() <= 0).any() || !k.allFinite()) break;
    }
    if (!converged) continue;
    converged_once = true;
    finish({k(0), k(1), k(2), k(3)});
    sol.delta = delta;
    sol.newton_iterations = it;
    if (!admissible()) continue;
    sol.phi = lemma41_phi(graph_of(p.f1), sol.f2(), opt.table_size, tol);
    return sol;
  }
  if (!converged_once) throw Error(ErrorKind::NoConvergence, "corrector did not converge for any step size");
  throw Error(ErrorKind::ConvexityLost, "step ladder exhausted before f2 met convexity and the sup-norm bound");
}

}  // namespace rigidity
