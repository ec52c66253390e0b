#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "rigidity/geodesic.hpp"

namespace checks {

/// Metric axioms of a sample: exact symmetry, zero diagonal, triangle
/// inequality within tau, Euclidean lower bound. Returns "" when all hold.
inline std::string metric_axioms(const rigidity::Domain& d, const rigidity::MetricSample& m, double tau) {
  const std::size_t n = m.points.size();
  std::ostringstream err;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.D[i][i] != 0.0) err << "diag " << i << " = " << m.D[i][i] << "; ";
    const auto pi_ = rigidity::point_at(d, m.points[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (m.D[i][j] != m.D[j][i]) err << "asym " << i << "," << j << "; ";
      const double eu = rigidity::distance(pi_, rigidity::point_at(d, m.points[j]));
      if (m.D[i][j] < eu * (1 - 1e-14) - 1e-15) err << "below chord " << i << "," << j << "; ";
      for (std::size_t k = 0; k < n; ++k)
        if (m.D[i][k] > m.D[i][j] + m.D[j][k] + tau) err << "triangle " << i << "," << j << "," << k << "; ";
    }
    if (err.tellp() > 2000) break;
  }
  return err.str();
}

}  // namespace checks
