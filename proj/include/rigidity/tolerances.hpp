#pragma once

namespace rigidity {

/// Numerical tolerances. Entries with the _rel suffix are multiplied by the
/// domain diameter before use.
struct Tolerances {
  double join_rel = 1e-9;        // endpoint matching between pieces
  double simple_rel = 1e-9;      // self-intersection detection
  double collinear = 1e-7;       // radians, straight sub-arc detection
  double minlen_rel = 1e-6;      // suppress shorter straight sub-arcs
  double flat_rel = 1e-5;        // chord/tangent sag when flattening arcs
  double turn = 1e-3;            // radians, tangent agreement and turning refinement
  double inside_rel = 1e-9;      // containment certificates
  double convex = 1e-9;          // allowed negative turn (sine) in convexity tests
  double metric_rel = 1e-8;      // triangle inequality slack
  double clip_margin_frac = 0.1; // fraction of the clip box size kept clear
  double iso_rel = 1e-7;         // local isometry floor (also >= 3x flattening bound)
  double congr_rel = 1e-6;       // congruence residual
};

inline constexpr Tolerances default_tolerances{};

}  // namespace rigidity
