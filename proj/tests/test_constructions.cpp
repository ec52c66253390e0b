#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "rigidity/constructions.hpp"
#include "rigidity/corpus.hpp"
#include "support/oracles.hpp"

using namespace rigidity;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidInput;
}

// Cardioid r = 1 - sin(phi) squared out: (x^2 + z^2 + z)^2 = x^2 + z^2.
double cardioid_poly(double x, double z) {
  const double r2 = x * x + z * z;
  return (r2 + z) * (r2 + z) - r2;
}

// dz/dx by implicit differentiation of the polynomial form.
double cardioid_poly_slope(double x, double z) {
  const double q = x * x + z * z + z;
  const double fx = 4 * q * x - 2 * x;
  const double fz = 2 * q * (2 * z + 1) - 2 * z;
  return -fx / fz;
}

double circle_poly(double x, double z) { return x * x + (z - 1) * (z - 1) - 2.0 / 3.0; }

}  // namespace

// ---------------------------------------------------------------------------
// Bent copy of a flat piece.

TEST(Step5, ClosedFormLengthsAndPoint) {
  for (double l : {1.0, 0.3, 2.5}) {
    const auto s = step5_pair(l);
    EXPECT_NEAR(s.replaced_length, l, 1e-15 * l);
    EXPECT_NEAR(s.arc_length, l, 1e-15 * l);
    EXPECT_NEAR(s.p.x, -2 * l / pi, 1e-15);
    EXPECT_NEAR(s.p.y, 2 * l / pi, 1e-15);
    EXPECT_NEAR(component_length(s.u.components[0]), component_length(s.v.components[0]), 1e-14 * l);
    EXPECT_EQ(s.provenance, Provenance::Step5);
  }
}

TEST(Step5, BentCopyPassesThroughP) {
  const auto s = step5_pair(1.0);
  // V reaches P exactly where U reaches (-1, 0): after the fixed part and the replaced segment.
  const double at = piece_offsets(s.u.components[0])[4];
  EXPECT_LT(distance(component_point(s.v.components[0], at), s.p), 1e-14);
  EXPECT_LT(distance(component_point(s.u.components[0], at), Vec2{-1, 0}), 1e-14);
}

TEST(Step5, WeldsAreC1AndDomainsValid) {
  const auto s = step5_pair(1.0);
  const auto ru = validate(s.u), rv = validate(s.v);
  EXPECT_TRUE(ru.valid());
  EXPECT_TRUE(rv.valid());
  EXPECT_TRUE(ru.smooth());
  EXPECT_TRUE(rv.smooth());
  // Tangents agree across every junction of V to rounding.
  const auto& c = s.v.components[0];
  for (std::size_t i = 0; i + 1 < c.pieces.size(); ++i) {
    const Vec2 a = piece_end_tangent(c.pieces[i]), b = piece_tangent(c.pieces[i + 1], 0.0);
    EXPECT_LT(std::abs(cross(a, b)), 1e-14);
    EXPECT_GT(dot(a, b), 0.0);
  }
}

TEST(Step5, ConvexWithFlatPieceAgainstNonconvex) {
  const auto s = step5_pair(1.0);
  EXPECT_TRUE(is_convex(s.u));
  EXPECT_FALSE(is_strictly_convex(s.u));
  EXPECT_FALSE(is_convex(s.v));
  double longest = 0.0;
  for (const auto& seg : maximal_segments(s.u).segments) longest = std::max(longest, seg.length());
  EXPECT_NEAR(longest, 4.0, 1e-12);
}

TEST(Step5, Errors) {
  EXPECT_EQ(kind_of([] { step5_pair(0.0); }), ErrorKind::InvalidInput);
  EXPECT_EQ(kind_of([] { step5_pair(1.0, ClipBox{-3.5, -3.5, 3.5, 3.5}); }), ErrorKind::ClipTooSmall);
}

// ---------------------------------------------------------------------------
// Nonconvex deformation.

TEST(Deformation, SmoothedLWitness) {
  const auto u = corpus::smoothed_l();
  const double diam = domain_diameter(u);
  const auto d = nonconvex_deformation(u, 0.02 * diam);
  EXPECT_EQ(d.provenance, Provenance::Deformation);
  EXPECT_TRUE(validate(d.v).valid());
  EXPECT_GT(d.amplitude, 0.0);
  EXPECT_LE(d.amplitude, 0.02 * diam);
  EXPECT_TRUE(check_intrinsic_isometry(d.u, d.v, d.f));
  EXPECT_TRUE(check_local_isometry_ladder(d.u, d.v, d.f, 128).pass);
  const auto c = find_congruence(d.u, d.v, 512);
  EXPECT_FALSE(c.found);
  EXPECT_GT(c.residual, default_tolerances.congr_rel * diam);
}

TEST(Deformation, OnlyTheReplacedArcMoves) {
  const auto u = corpus::smoothed_l();
  const auto d = nonconvex_deformation(u, 0.02 * domain_diameter(u));
  const auto& cu = d.u.components[0];
  const auto& cv = d.v.components[0];
  const double L = component_length(cu);
  EXPECT_NEAR(component_length(cv), L, 1e-12 * L);
  double moved = 0.0;
  for (int k = 0; k < 2000; ++k) {
    const double s = L * k / 2000.0;
    const double gap = distance(component_point(cu, s), component_point(cv, s));
    if (s < d.s_start - 1e-9 || s > d.s_end + 1e-9) {
      EXPECT_LT(gap, 1e-12) << "s=" << s;
    } else {
      moved = std::max(moved, gap);
      // The new arc stays in the disk K.
      EXPECT_LE(distance(component_point(cv, s), d.contact), d.radius);
    }
  }
  EXPECT_GT(moved, 0.0);
}

TEST(Deformation, ZeroAmplitudeIsIdentity) {
  const auto u = corpus::smoothed_l();
  const auto d = nonconvex_deformation(u, 0.0);
  EXPECT_TRUE(find_congruence(d.u, d.v, 128).found);
  EXPECT_LT(d.s_start, d.s_end);
}

TEST(Deformation, ConvexInputRejected) {
  for (const auto& u : {corpus::disk(), corpus::unit_square(), corpus::stadium(), corpus::ellipse(2, 1, 64)})
    EXPECT_EQ(kind_of([&] { nonconvex_deformation(u, 0.01); }), ErrorKind::ConvexDomain);
  EXPECT_EQ(kind_of([] { nonconvex_deformation(corpus::annulus(), 0.01); }), ErrorKind::InvalidInput);
}

// ---------------------------------------------------------------------------
// Cardioid profile.

TEST(Cardioid, JunctionOnBothCurves) {
  const Vec2 j{std::sqrt(5.0) / 9.0, 2.0 / 9.0};
  EXPECT_LE(std::abs(cardioid_poly(j.x, j.y)), 1e-12);
  EXPECT_LE(std::abs(circle_poly(j.x, j.y)), 1e-12);
  const auto p = cardioid_profile(1e-4);
  EXPECT_LT(distance(p.junction, j), 1e-16);
  EXPECT_LE(std::abs(cardioid_equation(p.junction)), 1e-12);
  EXPECT_LE(std::abs(weld_circle_equation(p.junction)), 1e-12);
}

TEST(Cardioid, OneSidedSlopesAgree) {
  const double expected = std::sqrt(5.0) / 7.0;
  const Vec2 j{std::sqrt(5.0) / 9.0, 2.0 / 9.0};
  EXPECT_NEAR(cardioid_poly_slope(j.x, j.y), expected, 1e-14);
  EXPECT_NEAR(-j.x / (j.y - 1), expected, 1e-15);  // circle, implicit
  const auto p = cardioid_profile(1e-4);
  EXPECT_NEAR(p.slope_cardioid, expected, 1e-9);
  EXPECT_NEAR(p.slope_circle, expected, 1e-9);
}

TEST(Cardioid, ProfileEndpointsAndSag) {
  EXPECT_EQ(cardioid_poly(0.0, -2.0), 0.0);
  const double tau = 1e-4;
  const auto p = cardioid_profile(tau);
  EXPECT_LT(distance(component_point(p.profile, 0.0), Vec2{0, -2}), 1e-15);
  const Vec2 top = component_point(p.profile, component_length(p.profile));
  EXPECT_NEAR(top.x, 0.0, 1e-15);
  EXPECT_NEAR(top.y, 1.0 - std::sqrt(2.0 / 3.0), 1e-15);
  EXPECT_TRUE(validate(p.domain).valid());

  // Every exact cardioid point up to the junction is within tau of the polyline.
  const auto& poly = std::get<Polyline>(p.profile.pieces[0]).points;
  for (int k = 0; k <= 4000; ++k) {
    const double phi = -pi / 2 + (std::asin(2.0 / 3.0) + pi / 2) * k / 4000.0;
    const double r = 1 - std::sin(phi);
    const Vec2 x{r * std::cos(phi), r * std::sin(phi)};
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) best = std::min(best, oracle::seg_dist(x, poly[i], poly[i + 1]));
    EXPECT_LE(best, tau * (1 + 1e-9));
  }
  for (Vec2 q : poly) EXPECT_LE(std::abs(cardioid_poly(q.x, q.y)), 1e-14);
}

TEST(Cardioid, Errors) { EXPECT_EQ(kind_of([] { cardioid_profile(0.0); }), ErrorKind::InvalidInput); }

TEST(Cardioid, StlVerticesLieOnTheSurface) {
  const auto p = cardioid_profile(1e-3);
  std::ostringstream os;
  revolve_export(os, p.profile, 24, 5e-2);
  std::istringstream is(os.str());
  std::string line, word;
  std::getline(is, line);
  EXPECT_EQ(line, "solid profile");
  std::size_t facets = 0, vertices = 0;
  while (is >> word) {
    if (word == "facet") {
      ++facets;
      double nx, ny, nz;
      is >> word >> nx >> ny >> nz;
      EXPECT_NEAR(std::sqrt(nx * nx + ny * ny + nz * nz), 1.0, 1e-8);
    } else if (word == "vertex") {
      ++vertices;
      double x, y, z;
      is >> x >> y >> z;
      const double r = std::hypot(x, y);
      const double resid = std::min(std::abs(cardioid_poly(r, z)), std::abs(circle_poly(r, z)));
      EXPECT_LE(resid, 1e-7) << r << " " << z;
    } else if (word == "endsolid") {
      break;
    }
  }
  EXPECT_GT(facets, 0u);
  EXPECT_EQ(vertices, 3 * facets);
}
