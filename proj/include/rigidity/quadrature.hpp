#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rigidity/error.hpp"

namespace rigidity {

inline constexpr double default_tau_quad = 1e-12;

/// Adaptive Gauss-Kronrod integral of g over [a, b], split at the given
/// breakpoints (those outside ]a, b[ are ignored). Each piece must be smooth.
template <class G>
double quadrature(G&& g, double a, double b, const std::vector<double>& breakpoints = {}, double tau_quad = default_tau_quad) {
  if (!(std::isfinite(a) && std::isfinite(b))) throw Error(ErrorKind::InvalidInput, "quadrature bounds must be finite");
  if (a == b) return 0.0;
  const double sign = a < b ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);

  std::vector<double> cuts{lo};
  for (double x : breakpoints)
    if (x > lo && x < hi) cuts.push_back(x);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto checked = [&](double t) {
    const double v = g(t);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteIntegrand, "integrand is not finite");
    return v;
  };

  // Fixed 31-point Gauss-Kronrod rule with bisection driven by the scaled
  // |K - G| estimate. Boost's own recursion reports leaf estimates on [-1, 1]
  // without rescaling, which inflates them near the rounding floor.
  using boost::math::quadrature::gauss_kronrod;
  double error_budget = 0.0;
  auto adapt = [&](auto&& self, double lo, double hi, double budget, int depth) -> double {
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(checked, lo, hi, 0, 0.0, &err);
    err *= 0.5 * (hi - lo);
    if (err <= budget || depth == 0) {
      error_budget += err;
      return v;
    }
    const double mid = 0.5 * (lo + hi);
    return self(self, lo, mid, budget / 2, depth - 1) + self(self, mid, hi, budget / 2, depth - 1);
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += adapt(adapt, cuts[i], cuts[i + 1], tau_quad * (cuts[i + 1] - cuts[i]) / (hi - lo), 30);
  if (!(error_budget <= tau_quad))
    throw Error(ErrorKind::NoConvergence, "quadrature error estimate exceeds tau_quad");
  return sign * total;
}

}  // namespace rigidity
