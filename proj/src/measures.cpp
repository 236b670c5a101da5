#include "gpcs/measures.hpp"

#include <algorithm>
#include <map>

namespace gpcs {

namespace {

GcsEstimate weighted_measure(std::span<const BivariatePoint> points, const std::vector<int>& labels,
                             Scenario scenario) {
  // Remap labels to 1..K by order of first appearance.
  std::map<int, int> remap;
  std::vector<int> compact(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto it = remap.try_emplace(labels[i], static_cast<int>(remap.size()) + 1).first;
    compact[i] = it->second;
  }
  const int k = static_cast<int>(remap.size());

  std::vector<std::vector<BivariatePoint>> classes(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < compact.size(); ++i) {
    classes[static_cast<std::size_t>(compact[i]) - 1].push_back(points[i]);
  }

  GcsEstimate est;
  est.scenario = scenario;
  est.k = k;
  est.components.reserve(static_cast<std::size_t>(k));
  const double n = static_cast<double>(points.size());
  for (const auto& cls : classes) {
    ComponentSummary s = component_summary(cls);
    s.weight = static_cast<double>(cls.size()) / n;
    est.value += s.weight * s.rho2;
    est.components.push_back(std::move(s));
  }
  est.value = std::clamp(est.value, 0.0, 1.0);
  return est;
}

}  // namespace

GcsEstimate r2_gs(const BivariateSample& sample) {
  if (!sample.has_labels()) {
    throw Error(errc::missing_labels, "r2_gs: sample carries no line-membership labels");
  }
  return weighted_measure(sample.points(), sample.labels(), Scenario::Specified);
}

GcsEstimate r2_gu(std::span<const BivariatePoint> points, int k, const KlinesConfig& config) {
  if (points.size() < 2) {
    throw Error(errc::insufficient_data, "r2_gu: need at least 2 points");
  }
  FitResult fit = klines_fit(points, k, config);
  GcsEstimate est = weighted_measure(points, fit.labels, Scenario::Unspecified);
  est.fit = std::move(fit);
  return est;
}

GcsEstimate r2_gu_auto(std::span<const BivariatePoint> points, int k_max,
                       const KlinesConfig& config) {
  const int k = select_k_aic(points, k_max, config);
  return r2_gu(points, k, config);
}

}  // namespace gpcs
