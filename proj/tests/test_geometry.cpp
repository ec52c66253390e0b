#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rigidity/corpus.hpp"
#include "rigidity/predicates.hpp"
#include "rigidity/validate.hpp"
#include "support/oracles.hpp"

using namespace rigidity;

namespace {

bool has_issue(const ValidationReport& r, IssueKind k) {
  for (const auto& i : r.issues)
    if (i.kind == k) return true;
  return false;
}

// Corpus of simply connected domains with random sizes and placements.
std::vector<Domain> generated_corpus(unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> scale(0.3, 3.0), shift(-5.0, 5.0), angle(0.0, two_pi);
  std::vector<Domain> out;
  for (int i = 0; i < 4; ++i) {
    const RigidMotion m{angle(rng), {shift(rng), shift(rng)}, false};
    const double s = scale(rng);
    out.push_back(corpus::disk(s, {shift(rng), shift(rng)}));
    out.push_back(transformed(corpus::polygon({{0, 0}, {s, 0}, {s, s}, {0, s}}), m));
    out.push_back(transformed(corpus::stadium(), m));
    out.push_back(transformed(corpus::polygon({{0, 0}, {2 * s, 0}, {2 * s, s}, {s, s}, {s, 2 * s}, {0, 2 * s}}), m));
  }
  return out;
}

}  // namespace

TEST(Validate, UnitDiskIsValid) {
  const auto r = validate(corpus::disk());
  EXPECT_TRUE(r.valid());
  EXPECT_TRUE(r.smooth());
}

TEST(Validate, DisplacedCornerGivesJoinGap) {
  BoundaryComponent c;
  c.pieces = {LineSegment{{0, 0}, {1, 0}}, LineSegment{{1, 0}, {1, 1}}, LineSegment{{1.1, 1.05}, {0, 1}}, LineSegment{{0, 1}, {0, 0}}};
  const auto r = validate(Domain{{c}, std::nullopt});
  ASSERT_TRUE(has_issue(r, IssueKind::JoinGap));
  EXPECT_EQ(r.issues.front().piece, 1u);
}

TEST(Validate, FigureEightSelfIntersects) {
  EXPECT_TRUE(has_issue(validate(corpus::figure_eight()), IssueKind::SelfIntersection));
}

TEST(Validate, ClockwiseOuterRejected) {
  EXPECT_TRUE(has_issue(validate(corpus::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}})), IssueKind::Orientation));
}

TEST(Validate, AnnulusValidAndHoleOrientation) {
  EXPECT_TRUE(validate(corpus::annulus()).valid());
  Domain bad = corpus::annulus();
  bad.components[1] = reversed(bad.components[1]);
  EXPECT_TRUE(has_issue(validate(bad), IssueKind::Orientation));
}

TEST(Validate, SquareCornersReported) {
  const auto r = validate(corpus::unit_square());
  EXPECT_TRUE(r.valid());
  EXPECT_EQ(r.corners.size(), 4u);
  EXPECT_TRUE(validate(corpus::stadium()).smooth());
  EXPECT_TRUE(validate(corpus::smoothed_l()).valid());
}

TEST(Validate, BadPieces) {
  BoundaryComponent c;
  c.pieces = {CircularArc{{0, 0}, -1.0, 0.0, two_pi}};
  EXPECT_TRUE(has_issue(validate(Domain{{c}, std::nullopt}), IssueKind::BadPiece));
  c.pieces = {CircularArc{{0, 0}, 1.0, 0.0, 7.0}};
  EXPECT_TRUE(has_issue(validate(Domain{{c}, std::nullopt}), IssueKind::BadPiece));
}

TEST(Validate, OpenComponentNeedsClip) {
  BoundaryComponent c{{LineSegment{{1, 0}, {-1, 0}}}, false};
  EXPECT_TRUE(has_issue(validate(Domain{{c}, std::nullopt}), IssueKind::Clip));
  EXPECT_TRUE(validate(Domain{{c}, ClipBox{-5, -5, 5, 5}}).valid());
}

TEST(PointAt, UnitCircle) {
  const auto d = corpus::disk();
  const Vec2 p = point_at(d, {0, pi / 2});
  EXPECT_NEAR(p.x, 0.0, 1e-15);
  EXPECT_NEAR(p.y, 1.0, 1e-15);
  const Vec2 t = tangent_at(d, {0, pi / 2});
  EXPECT_NEAR(t.x, -1.0, 1e-15);
  EXPECT_NEAR(t.y, 0.0, 1e-15);
}

TEST(PointAt, UnitSquareAndJunction) {
  const auto d = corpus::unit_square();
  const Vec2 p = point_at(d, {0, 1.5});
  EXPECT_NEAR(p.x, 1.0, 1e-15);
  EXPECT_NEAR(p.y, 0.5, 1e-15);
  EXPECT_NEAR(tangent_at(d, {0, 1.5}).y, 1.0, 1e-15);
  // Forward tangent at a junction.
  const Vec2 t = tangent_at(d, {0, 1.0});
  EXPECT_NEAR(t.x, 0.0, 1e-15);
  EXPECT_NEAR(t.y, 1.0, 1e-15);
}

TEST(PointAt, PolylineForwardDifference) {
  const auto d = corpus::ellipse(2.0, 1.0, 100);
  const auto& pts = std::get<Polyline>(d.components[0].pieces[0]).points;
  const Vec2 p = point_at(d, {0, 0.0});
  EXPECT_EQ(p, pts[0]);
  const Vec2 t = tangent_at(d, {0, 0.0});
  const Vec2 fd = normalized(pts[1] - pts[0]);
  EXPECT_NEAR(t.x, fd.x, 1e-15);
  EXPECT_NEAR(t.y, fd.y, 1e-15);
}

TEST(PointAt, OutOfRange) {
  const auto d = corpus::unit_square();
  EXPECT_THROW(point_at(d, {0, 4.0}), Error);
  EXPECT_THROW(point_at(d, {0, -0.1}), Error);
  EXPECT_THROW(point_at(d, {1, 0.0}), Error);
}

TEST(MaximalSegments, Square) {
  const auto s = maximal_segments(corpus::unit_square());
  ASSERT_EQ(s.size(), 4u);
  for (const auto& r : s.segments) EXPECT_NEAR(r.length(), 1.0, 1e-12);
}

TEST(MaximalSegments, CircleEmpty) { EXPECT_TRUE(maximal_segments(corpus::disk()).empty()); }

TEST(MaximalSegments, StadiumMatchesBruteForce) {
  const auto d = corpus::stadium();
  const auto s = maximal_segments(d);
  ASSERT_EQ(s.size(), 2u);
  for (const auto& r : s.segments) EXPECT_NEAR(r.length(), 2.0, 1e-12);
  const double h = 1e-3;
  const auto runs = oracle::straight_runs(oracle::sample_component(d.components[0], h), 1e-9, 0.1);
  ASSERT_EQ(runs.size(), 2u);
  for (double r : runs) EXPECT_NEAR(r, 2.0, 2 * h);
}

TEST(MaximalSegments, MergesCollinearPiecesAndSeam) {
  // Square whose bottom edge is split in two and whose start is mid-edge.
  BoundaryComponent c;
  c.pieces = {LineSegment{{0.5, 0}, {1, 0}}, LineSegment{{1, 0}, {1, 1}}, LineSegment{{1, 1}, {0, 1}}, LineSegment{{0, 1}, {0, 0}},
              LineSegment{{0, 0}, {0.25, 0}}, LineSegment{{0.25, 0}, {0.5, 0}}};
  const auto s = maximal_segments(Domain{{c}, std::nullopt});
  ASSERT_EQ(s.size(), 4u);
  for (const auto& r : s.segments) EXPECT_NEAR(r.length(), 1.0, 1e-12);
}

TEST(MaximalSegments, PolylineStraightRuns) {
  // Square as one polyline with extra collinear vertices.
  BoundaryComponent c{{Polyline{{{0, 0}, {0.3, 0}, {1, 0}, {1, 0.5}, {1, 1}, {0, 1}, {0, 0}}}}, true};
  const auto s = maximal_segments(Domain{{c}, std::nullopt});
  ASSERT_EQ(s.size(), 4u);
  // The ellipse polyline is made of tiny non-collinear chords: each one is its
  // own maximal straight sub-arc.
  const auto e = maximal_segments(corpus::ellipse(2, 1, 64));
  EXPECT_EQ(e.size(), 64u);
}

TEST(Convexity, Examples) {
  EXPECT_TRUE(is_convex(corpus::disk()));
  EXPECT_TRUE(is_strictly_convex(corpus::disk()));
  EXPECT_TRUE(is_convex(corpus::unit_square()));
  EXPECT_FALSE(is_strictly_convex(corpus::unit_square()));
  EXPECT_FALSE(is_convex(corpus::l_hexagon()));
  EXPECT_FALSE(is_convex(corpus::smoothed_l()));
  EXPECT_TRUE(is_convex(corpus::stadium()));
  EXPECT_FALSE(is_strictly_convex(corpus::stadium()));
  EXPECT_THROW(is_convex(corpus::annulus()), Error);
  try {
    is_convex(corpus::annulus());
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSimplyBounded);
  }
}

TEST(Convexity, StrictIffConvexAndNoSegmentsOnCorpus) {
  for (unsigned seed = 0; seed < 5; ++seed)
    for (const auto& d : generated_corpus(seed)) {
      const auto r = convexity(d);
      const bool no_segments = maximal_segments(d).empty();
      if (r.strictly_convex) { EXPECT_TRUE(r.convex); }
      EXPECT_EQ(r.strictly_convex, r.convex && no_segments);
    }
}

TEST(Turning, Examples) {
  const auto seg = Domain{{BoundaryComponent{{LineSegment{{0, 0}, {3, 0}}, LineSegment{{3, 0}, {0, 1}}, LineSegment{{0, 1}, {0, 0}}}, true}}, std::nullopt};
  EXPECT_NEAR(tangent_turning(seg, 0, 0.5, 2.5).turning, 0.0, 1e-15);
  BoundaryComponent arc{{CircularArc{{0, 0}, 2.0, 0.3, 1.1}}, false};
  const Domain arc_domain{{arc}, ClipBox{-5, -5, 5, 5}};
  EXPECT_NEAR(tangent_turning(arc_domain, 0, 0.0, 2.2).turning, 1.1, 1e-3);
  EXPECT_NEAR(tangent_turning(corpus::disk(), 0, 0.0, two_pi).turning, two_pi, 1e-3);
}

TEST(Turning, ConvexFullLoopIsTwoPiOnCorpus) {
  for (unsigned seed = 0; seed < 3; ++seed)
    for (const auto& d : generated_corpus(seed)) {
      if (!is_convex(d)) continue;
      const double L = component_length(d.components[0]);
      const auto r = tangent_turning(d, 0, 0.0, L);
      EXPECT_NEAR(r.turning, two_pi, default_tolerances.turn);
      EXPECT_GE(r.turning + 1e-12, std::abs(r.net));
    }
}

TEST(Turning, NonConvexVariationExceedsNet) {
  const auto d = corpus::smoothed_l();
  const double L = component_length(d.components[0]);
  const auto r = tangent_turning(d, 0, 0.0, L);
  EXPECT_NEAR(r.net, two_pi, 1e-9);
  EXPECT_NEAR(r.turning, two_pi + pi, default_tolerances.turn);
  EXPECT_THROW(tangent_turning(d, 0, 1.0, 0.5), Error);
  EXPECT_THROW(tangent_turning(d, 0, 0.0, L + 1.0), Error);
}

TEST(Partition, SegmentsAndComplementsCoverComponent) {
  for (unsigned seed = 0; seed < 3; ++seed)
    for (const auto& d : generated_corpus(seed)) {
      const double L = component_length(d.components[0]);
      double straight = 0.0;
      auto runs = maximal_segments(d).segments;
      for (const auto& r : runs) straight += r.length();
      // Complements: gaps between consecutive runs, cyclically.
      std::sort(runs.begin(), runs.end(), [](const auto& a, const auto& b) { return a.s_start < b.s_start; });
      double gaps = 0.0;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const double next_start = i + 1 < runs.size() ? runs[i + 1].s_start : runs[0].s_start + L;
        EXPECT_GE(next_start - runs[i].s_end, -1e-12);
        gaps += next_start - runs[i].s_end;
      }
      if (runs.empty()) gaps = L;
      EXPECT_NEAR(straight + gaps, L, 1e-9 * L);
    }
}

TEST(SupportingSegment, LHexagonThroughReflexVertex) {
  const auto d = corpus::l_hexagon();
  const auto s = supporting_segment(d);
  EXPECT_NEAR(s.contact.x, 1.0, 1e-12);
  EXPECT_NEAR(s.contact.y, 1.0, 1e-12);
  // Oracle: every chord through (1,1) with direction within the open
  // reflex cone and reaching the boundary both ways stays inside; check
  // the returned chord against an independent winding-number test.
  const std::vector<Vec2> ring{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  EXPECT_LT(oracle::seg_dist(s.contact, s.a, s.b), 1e-12);
  for (int k = 1; k < 200; ++k) {
    const Vec2 q = s.a + (s.b - s.a) * (k / 200.0);
    if (distance(q, s.contact) < 1e-9) continue;
    EXPECT_TRUE(oracle::inside_ring(ring, q)) << q.x << "," << q.y;
  }
  // Brute force over vertex-pair chords: (2,0)-(0,2) is the one through P.
  EXPECT_NEAR(std::abs(cross(normalized(s.b - s.a), normalized(Vec2{-1, 1}))), 0.0, 1e-9);
}

TEST(SupportingSegment, SmoothedLTangentToFillet) {
  const auto d = corpus::smoothed_l();
  const auto s = supporting_segment(d);
  EXPECT_NEAR(distance(s.contact, {1.1, 1.1}), 0.1, 1e-12);
  // Tangent: the chord is perpendicular to the fillet radius at P.
  EXPECT_NEAR(dot(normalized(s.b - s.a), normalized(s.contact - Vec2{1.1, 1.1})), 0.0, 1e-9);
  // Dense-chord oracle: points of the open chord away from P lie inside the
  // true domain (fillet disk excluded).
  const std::vector<Vec2> ring{{0, 0}, {2, 0}, {2, 2}, {0, 2}};
  for (int k = 1; k < 400; ++k) {
    const Vec2 q = s.a + (s.b - s.a) * (k / 400.0);
    if (distance(q, s.contact) < 1e-6) continue;
    EXPECT_TRUE(oracle::inside_ring(ring, q));
    const bool in_notch = q.x > 1.0 && q.y > 1.0 && !(q.x < 1.1 && q.y < 1.1 && distance(q, {1.1, 1.1}) > 0.1);
    EXPECT_FALSE(in_notch) << q.x << "," << q.y;
  }
}

TEST(SupportingSegment, ConvexRejected) {
  try {
    supporting_segment(corpus::disk());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConvexDomain);
  }
}
