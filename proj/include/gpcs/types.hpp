#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gpcs {

enum class errc {
  invalid_argument,
  invalid_sample,
  degenerate_cluster,
  insufficient_data,
  singular_covariance,
  no_feasible_k,
  missing_labels,
  missing_moments,
  dimension_mismatch,
  unknown_setting,
  non_convergence,
  bootstrap_failure,
  io_error,
  missing_column,
  parse_error,
};

/// Library-wide exception carrying a machine-readable error class.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

struct BivariatePoint {
  double x = 0.0;
  double y = 0.0;
};

inline bool finite(const BivariatePoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

/// A line a*x + b*y + c = 0 kept in normalized form: a^2 + b^2 = 1 and
/// a > 0, or a == 0 and b > 0. Normalization makes the perpendicular
/// distance |a*x + b*y + c| and makes line equality well defined.
struct Line {
  double a = 1.0;
  double b = 0.0;
  double c = 0.0;

  static Line normalized(double a, double b, double c);

  /// Line through p with direction (ux, uy).
  static Line through(const BivariatePoint& p, double ux, double uy);
};

inline Line Line::normalized(double a, double b, double c) {
  const double norm = std::hypot(a, b);
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(c)) {
    throw Error(errc::invalid_argument, "Line::normalized: (a,b) must be a finite nonzero vector");
  }
  a /= norm;
  b /= norm;
  c /= norm;
  if (a < 0.0 || (a == 0.0 && b < 0.0)) {
    a = -a;
    b = -b;
    c = -c;
  }
  if (a == 0.0) a = 0.0;  // normalize -0.0
  return Line{a, b, c};
}

inline Line Line::through(const BivariatePoint& p, double ux, double uy) {
  // Normal of direction (ux,uy) is (uy,-ux); c chosen so p lies on the line.
  return normalized(uy, -ux, -uy * p.x + ux * p.y);
}

/// An (x,y) sample, optionally with 1-based line-membership labels.
/// Construction rejects NaN/Inf coordinates and malformed labels.
class BivariateSample {
 public:
  explicit BivariateSample(std::vector<BivariatePoint> points)
      : BivariateSample(std::move(points), std::nullopt) {}

  BivariateSample(std::vector<BivariatePoint> points, std::optional<std::vector<int>> labels)
      : points_(std::move(points)), labels_(std::move(labels)) {
    if (points_.empty()) {
      throw Error(errc::invalid_sample, "BivariateSample: need at least one point");
    }
    for (const auto& p : points_) {
      if (!finite(p)) {
        throw Error(errc::invalid_sample, "BivariateSample: NaN/Inf coordinate rejected");
      }
    }
    if (labels_) {
      if (labels_->size() != points_.size()) {
        throw Error(errc::invalid_sample, "BivariateSample: labels/points length mismatch");
      }
      for (int z : *labels_) {
        if (z < 1) {
          throw Error(errc::invalid_sample, "BivariateSample: labels must be >= 1");
        }
      }
    }
  }

  const std::vector<BivariatePoint>& points() const noexcept { return points_; }
  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::vector<int>& labels() const {
    if (!labels_) throw Error(errc::missing_labels, "BivariateSample: no labels present");
    return *labels_;
  }
  std::size_t size() const noexcept { return points_.size(); }

 private:
  std::vector<BivariatePoint> points_;
  std::optional<std::vector<int>> labels_;
};

}  // namespace gpcs
