#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "gpcs/types.hpp"

namespace gpcs {

/// Perpendicular distance from p to a normalized line, |a*x + b*y + c|.
inline double perp_distance(const BivariatePoint& p, const Line& l) noexcept {
  return std::abs(l.a * p.x + l.b * p.y + l.c);
}

/// Per-component statistics of one sample cluster. All variances use the
/// divide-by-n (population style) convention; small-n values differ from
/// the Bessel-corrected ones.
struct ComponentSummary {
  double weight = 0.0;  // p_k, filled by the caller
  std::size_t n = 0;
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
  double rho2 = 0.0;  // squared component correlation; 0 when a variance vanishes

  /// Standardized mixed moments mu_{X^c Y^d} for c+d <= 4, computed on
  /// ((x-mean)/sd, (y-mean)/sd). Empty when standardization is undefined
  /// (n < 2 or a zero variance).
  std::map<std::pair<int, int>, double> std_moments;

  bool has_moments() const noexcept { return !std_moments.empty(); }

  double moment(int c, int d) const {
    const auto it = std_moments.find({c, d});
    if (it == std_moments.end()) {
      throw Error(errc::missing_moments, "ComponentSummary: standardized moment (" +
                                             std::to_string(c) + "," + std::to_string(d) +
                                             ") unavailable");
    }
    return it->second;
  }

  /// Signed component correlation; 0 when undefined.
  double rho() const {
    if (!has_moments()) return 0.0;
    return moment(1, 1);
  }
};

/// Major-axis (orthogonal) regression: the line through the sample mean in
/// the direction of the leading eigenvector of the 2x2 covariance matrix;
/// minimizes the summed squared perpendicular distances. The 2x2
/// eigenproblem is solved in closed form. When the two eigenvalues tie
/// within 1e-12 the direction (1,0) is chosen and *eigen_tie is set.
Line major_axis_line(std::span<const BivariatePoint> points, bool* eigen_tie = nullptr);

ComponentSummary component_summary(std::span<const BivariatePoint> points);

}  // namespace gpcs
