#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gpcs/core.hpp"
#include "gpcs/klines.hpp"
#include "gpcs/types.hpp"

namespace gpcs {

enum class Scenario { Specified, Unspecified };

/// A generalized Pearson correlation square, value = sum_k weight_k * rho2_k.
struct GcsEstimate {
  double value = 0.0;  // in [0, 1]
  Scenario scenario = Scenario::Specified;
  int k = 0;
  std::vector<ComponentSummary> components;  // weights filled
  std::optional<FitResult> fit;              // Unspecified only
};

/// Specified-scenario measure from labeled data. Distinct labels are
/// remapped to 1..K in order of first appearance; classes with fewer than
/// 2 points or a zero variance contribute rho2 = 0 at their weight.
GcsEstimate r2_gs(const BivariateSample& sample);

/// Unspecified-scenario measure: K-lines clustering provides surrogate
/// labels, then the weighted sum is computed as in the specified case.
/// The fit is recorded so downstream inference can reuse the partition.
GcsEstimate r2_gu(std::span<const BivariatePoint> points, int k, const KlinesConfig& config = {});

/// r2_gu at the AIC-chosen K (select_k_aic over 1..k_max).
GcsEstimate r2_gu_auto(std::span<const BivariatePoint> points, int k_max,
                       const KlinesConfig& config = {});

}  // namespace gpcs
