#pragma once

// Brute-force reference implementations used by the unit and acceptance
// suites. Everything here is deliberately independent of the library's own
// algorithms: enumeration and naive loops only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gpcs/klines.hpp"
#include "gpcs/types.hpp"

namespace gpcs::oracles {

inline Line part_line(const std::vector<BivariatePoint>& part) {
  if (part.size() >= 2) {
    try {
      return major_axis_line(part);
    } catch (const Error&) {
      // identical points: any line through them is optimal
    }
  }
  return Line::through(part.front(), 1.0, 0.0);
}

/// Exact K=2 optimum of the clustering objective by enumerating every
/// bipartition (point 0 pinned to side A) and scoring the fitted pair.
inline double exhaustive_k2_minimum(const std::vector<BivariatePoint>& pts) {
  const std::size_t n = pts.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask + 1 < (1u << (n - 1)); ++mask) {
    std::vector<BivariatePoint> a{pts[0]}, b;
    for (std::size_t i = 1; i < n; ++i) {
      if (mask & (1u << (i - 1))) a.push_back(pts[i]);
      else b.push_back(pts[i]);
    }
    best = std::min(best, objective_w(pts, LineSet{part_line(a), part_line(b)}));
  }
  best = std::min(best, objective_w(pts, LineSet{part_line(pts), part_line(pts)}));
  return best;
}

/// Distance covariance straight from the definition: explicit loops over
/// index tuples, no double-centered matrices.
inline double naive_dcov2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double dn = static_cast<double>(n);
  double s1 = 0.0, s2 = 0.0, sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = std::abs(x[i] - x[j]);
      const double b = std::abs(y[i] - y[j]);
      s1 += a * b;
      sa += a;
      sb += b;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        s2 += std::abs(x[i] - x[j]) * std::abs(y[i] - y[k]);
      }
    }
  }
  return s1 / (dn * dn) - 2.0 * s2 / (dn * dn * dn) + sa * sb / (dn * dn * dn * dn);
}

inline double naive_dcor(const std::vector<BivariatePoint>& pts) {
  std::vector<double> x, y;
  for (const auto& p : pts) {
    x.push_back(p.x);
    y.push_back(p.y);
  }
  const double vxy = naive_dcov2(x, y);
  const double vxx = naive_dcov2(x, x);
  const double vyy = naive_dcov2(y, y);
  const double denom = std::sqrt(vxx * vyy);
  if (!(denom > 0.0)) return 0.0;
  return std::sqrt(std::max(0.0, vxy) / denom);
}

}  // namespace gpcs::oracles
