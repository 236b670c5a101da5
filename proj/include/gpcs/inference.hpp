#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gpcs/core.hpp"
#include "gpcs/klines.hpp"
#include "gpcs/measures.hpp"
#include "gpcs/types.hpp"

namespace gpcs {

enum class VarianceVariant {
  GeneralMoments,      // Theorem-form variance from fourth standardized moments
  GaussianClosedForm,  // per-component Gaussian special case (weights and rho2 only)
};

enum class CiMethod { PluginAsymptotic, Bootstrap };

struct ConfidenceInterval {
  double lower = 0.0;  // raw bounds; clamp only when reporting
  double upper = 0.0;
  double level = 0.95;
  CiMethod method = CiMethod::PluginAsymptotic;
  std::optional<VarianceVariant> variant;
  double se = 0.0;

  double clamped_lower() const { return lower < 0.0 ? 0.0 : (lower > 1.0 ? 1.0 : lower); }
  double clamped_upper() const { return upper < 0.0 ? 0.0 : (upper > 1.0 ? 1.0 : upper); }
};

/// Standard normal quantile (inverse CDF), Wichura's rational
/// approximation; absolute error well below 1e-9.
double normal_quantile(double p);

double normal_cdf(double x);

/// Asymptotic variance of sqrt(n) * (measure - target) in the general
/// moment form:
///   sum_k (A_k + B_k) + 2 sum_{k<r} C_kr
///   A_k = p_k [ rho_k^4 (m40 + 2 m22 + m04) - 4 rho_k^3 (m31 + m13) + 4 rho_k^2 m22 ]
///   B_k = p_k (1 - p_k) rho_k^4,   C_kr = -p_k p_r rho_k^2 rho_r^2
/// rho_k is the signed correlation, taken from the (1,1) standardized
/// moment. Components with rho2 == 0 contribute nothing and need no
/// moments. A slightly negative total from near-degenerate plug-ins is
/// clamped to 0 (*clamped set when that happens).
double asy_var_general(std::span<const ComponentSummary> components, bool* clamped = nullptr);

/// Gaussian closed form:
///   sum_k [ 4 p_k r_k (1 - r_k)^2 + p_k (1 - p_k) r_k^2 ]
///   - 2 sum_{k<r} p_k p_r r_k r_r,   with r_k = rho2_k.
double asy_var_gaussian(std::span<const double> weights, std::span<const double> rho2s,
                        bool* clamped = nullptr);

/// Normal-theory interval value +- z_{(1+level)/2} * sqrt(V_hat / n), with
/// V_hat the chosen variance form evaluated at the estimate's plug-in
/// component statistics.
ConfidenceInterval plugin_ci(const GcsEstimate& estimate, std::size_t n, double level,
                             VarianceVariant variant);

enum class BootstrapMode { Parametric, Nonparametric };

struct BootstrapOptions {
  int replicates = 1000;  // B >= 100
  BootstrapMode mode = BootstrapMode::Nonparametric;
  double level = 0.95;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  KlinesConfig klines;  // used for unspecified-scenario refits
};

struct BootstrapCi {
  ConfidenceInterval ci;
  int dropped = 0;            // replicates that failed and were excluded
  double replicate_mean = 0;  // mean of the kept replicate values
};

/// Bootstrap interval value +- z * se, where se is the standard deviation
/// of the replicate measure values. Unspecified-scenario replicates refit
/// K-lines with fresh restart seeds; Parametric mode resamples from
/// per-component Gaussian fits. Fails if more than 10% of replicates drop.
BootstrapCi bootstrap_ci(const BivariateSample& sample, const GcsEstimate& estimate,
                         const BootstrapOptions& options);

}  // namespace gpcs
