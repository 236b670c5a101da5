#include "gpcs/core.hpp"

#include <cmath>

namespace gpcs {

namespace {

struct Cov2 {
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;  // divide-by-n
};

Cov2 covariance(std::span<const BivariatePoint> pts) {
  Cov2 c;
  const double n = static_cast<double>(pts.size());
  for (const auto& p : pts) {
    c.mean_x += p.x;
    c.mean_y += p.y;
  }
  c.mean_x /= n;
  c.mean_y /= n;
  for (const auto& p : pts) {
    const double dx = p.x - c.mean_x;
    const double dy = p.y - c.mean_y;
    c.sxx += dx * dx;
    c.syy += dy * dy;
    c.sxy += dx * dy;
  }
  c.sxx /= n;
  c.syy /= n;
  c.sxy /= n;
  return c;
}

}  // namespace

Line major_axis_line(std::span<const BivariatePoint> points, bool* eigen_tie) {
  if (eigen_tie) *eigen_tie = false;
  if (points.size() < 2) {
    throw Error(errc::insufficient_data, "major_axis_line: need at least 2 points");
  }
  const Cov2 c = covariance(points);
  if (c.sxx == 0.0 && c.syy == 0.0 && c.sxy == 0.0) {
    throw Error(errc::degenerate_cluster, "major_axis_line: all points identical");
  }

  // Closed-form eigendecomposition of [[sxx, sxy], [sxy, syy]].
  const double half_gap = 0.5 * (c.sxx - c.syy);
  const double disc = std::sqrt(half_gap * half_gap + c.sxy * c.sxy);
  const BivariatePoint mean{c.mean_x, c.mean_y};

  if (2.0 * disc <= 1e-12) {
    // Equal eigenvalues: every direction is a major axis; pick (1,0).
    if (eigen_tie) *eigen_tie = true;
    return Line::through(mean, 1.0, 0.0);
  }

  double ux, uy;
  if (c.sxy == 0.0) {
    if (c.sxx >= c.syy) {
      ux = 1.0;
      uy = 0.0;
    } else {
      ux = 0.0;
      uy = 1.0;
    }
  } else {
    // Leading eigenvalue lambda1 = (sxx+syy)/2 + disc; two algebraically
    // equivalent eigenvector forms, keep the better conditioned one.
    const double lambda1 = 0.5 * (c.sxx + c.syy) + disc;
    const double vx1 = lambda1 - c.syy, vy1 = c.sxy;
    const double vx2 = c.sxy, vy2 = lambda1 - c.sxx;
    if (vx1 * vx1 + vy1 * vy1 >= vx2 * vx2 + vy2 * vy2) {
      ux = vx1;
      uy = vy1;
    } else {
      ux = vx2;
      uy = vy2;
    }
  }
  return Line::through(mean, ux, uy);
}

ComponentSummary component_summary(std::span<const BivariatePoint> points) {
  if (points.empty()) {
    throw Error(errc::insufficient_data, "component_summary: empty point set");
  }
  ComponentSummary s;
  s.n = points.size();
  const Cov2 c = covariance(points);
  s.mean_x = c.mean_x;
  s.mean_y = c.mean_y;
  s.var_x = c.sxx;
  s.var_y = c.syy;
  s.cov_xy = c.sxy;

  if (points.size() < 2 || !(s.var_x > 0.0) || !(s.var_y > 0.0)) {
    s.rho2 = 0.0;  // zero-variance convention
    return s;
  }
  s.rho2 = (s.cov_xy * s.cov_xy) / (s.var_x * s.var_y);

  const double sd_x = std::sqrt(s.var_x);
  const double sd_y = std::sqrt(s.var_y);
  const double n = static_cast<double>(points.size());
  double sums[5][5] = {};
  for (const auto& p : points) {
    const double zx = (p.x - s.mean_x) / sd_x;
    const double zy = (p.y - s.mean_y) / sd_y;
    double xpow[5] = {1.0, zx, zx * zx, zx * zx * zx, zx * zx * zx * zx};
    double ypow[5] = {1.0, zy, zy * zy, zy * zy * zy, zy * zy * zy * zy};
    for (int cc = 0; cc <= 4; ++cc) {
      for (int dd = 0; cc + dd <= 4; ++dd) {
        sums[cc][dd] += xpow[cc] * ypow[dd];
      }
    }
  }
  for (int cc = 0; cc <= 4; ++cc) {
    for (int dd = 0; cc + dd <= 4; ++dd) {
      s.std_moments[{cc, dd}] = sums[cc][dd] / n;
    }
  }
  return s;
}

}  // namespace gpcs
