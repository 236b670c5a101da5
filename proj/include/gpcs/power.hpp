#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gpcs/klines.hpp"
#include "gpcs/types.hpp"

namespace gpcs {

enum class Pattern {
  TwoLinesMixedSign,      // slope +1 or -1 with probability 1/2 each
  Linear,                 // y = slope * x
  Parabola,               // y = x^2 / curve_scale
  PiecewiseNonlinearMix,  // mixture of two opposite-curvature arcs
  PureNoise,              // y independent of x (size-control smoke mode)
};

struct PatternSpec {
  Pattern pattern = Pattern::Linear;
  double sigma = 1.0;        // noise SD added to y
  double x_sd = 5.0;         // X ~ N(0, x_sd^2)
  double slope = 1.0;        // Linear / TwoLinesMixedSign slope magnitude
  double curve_scale = 5.0;  // Parabola / PiecewiseNonlinearMix: y = x^2 / curve_scale
};

/// X i.i.d. N(0, x_sd^2), Y = f(X) + N(0, sigma^2) with f per pattern.
BivariateSample generate_pattern(const PatternSpec& spec, std::size_t n, std::uint64_t seed);

/// Squared sample Pearson correlation; returns 0 (setting *zero_variance)
/// when either coordinate has no variance.
double pearson_r2(std::span<const BivariatePoint> points, bool* zero_variance = nullptr);

/// Distance correlation via the O(n^2) double-centered distance matrices.
double dcor(std::span<const BivariatePoint> points);

/// A named association measure for the permutation-power harness. The
/// per-sample seed funds stochastic measures (K-lines restarts).
struct PowerMeasure {
  std::string name;
  std::function<double(std::span<const BivariatePoint>, std::uint64_t)> eval;
};

PowerMeasure measure_pearson_r2();
PowerMeasure measure_dcor();
PowerMeasure measure_r2_gu(int k, const KlinesConfig& config = {});

struct PowerOptions {
  std::size_t n = 50;
  int replicates = 1000;  // B >= 200
  double alpha = 0.05;    // in (0, 0.5)
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct PowerReport {
  std::string measure;
  std::size_t n = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  double threshold = 0.0;  // empirical (1-alpha) quantile of the null values
  double power = 0.0;      // fraction of alternative values strictly above
  int b = 0;
};

/// The shared-null permutation protocol: B samples from the alternative,
/// one Y-permuted null twin each; per-measure thresholds come from the B
/// null values and power is the exceedance rate on the alternatives.
std::vector<PowerReport> permutation_power(const PatternSpec& pattern,
                                           const std::vector<PowerMeasure>& measures,
                                           const PowerOptions& options);

}  // namespace gpcs
