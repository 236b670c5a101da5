#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "gpcs/core.hpp"
#include "gpcs/types.hpp"

namespace gpcs {

/// Multiset of K line centers; repeats permitted.
using LineSet = std::vector<Line>;

enum class EmptyClusterPolicy {
  ReseedFarthest,  // re-seed an empty cluster around the worst-fit point
  Drop,            // remove the line, reducing K for that restart
};

enum class KlinesInit {
  /// K initial lines through K random point pairs. Restarts explore
  /// genuinely different basins; the default.
  RandomPairs,
  /// Uniformly random partition of all indices into K nonempty groups.
  /// On well-separated mixtures every random partition resembles the whole
  /// sample, so all restarts share one (often wrong) basin; kept as an
  /// option for comparison.
  RandomPartition,
};

struct KlinesConfig {
  int restarts = 30;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::ReseedFarthest;
  KlinesInit init = KlinesInit::RandomPairs;
  unsigned threads = 1;             // restarts run in parallel; 0 = all cores
  bool record_trajectories = false; // keep per-restart objective traces
};

struct FitResult {
  LineSet lines;
  std::vector<int> labels;  // 1..K, each point's nearest line (ties: lowest index)
  double objective = 0.0;   // W(B_K, P_n)
  int iterations = 0;
  int restarts_run = 0;
  bool converged = false;
  /// Objective after each (recenter, assign) iteration, one trace per
  /// restart; filled only when KlinesConfig::record_trajectories is set.
  std::vector<std::vector<double>> trajectories;
};

/// Average within-cluster squared perpendicular distance,
/// (1/n) * sum_i min_k d(point_i, line_k)^2.
double objective_w(std::span<const BivariatePoint> points, const LineSet& lines);

/// Nearest-line labels in 1..K; ties broken toward the lowest index.
std::vector<int> assign(std::span<const BivariatePoint> points, const LineSet& lines);

/// Major-axis line per label class. Clusters whose points are all
/// identical get the line through that point in direction (1,0) under
/// ReseedFarthest, and raise degenerate_cluster under Drop. Empty clusters
/// are re-seeded (ReseedFarthest) or removed (Drop).
LineSet recenter(std::span<const BivariatePoint> points, const std::vector<int>& labels, int k,
                 EmptyClusterPolicy policy = EmptyClusterPolicy::ReseedFarthest);

/// Lloyd-style alternation of assign/recenter from `restarts` random
/// initial partitions; returns the best fit by objective (ties: lowest
/// restart index). Deterministic given the seed, whatever the thread count.
FitResult klines_fit(std::span<const BivariatePoint> points, int k, const KlinesConfig& config = {});

/// (K, W) pairs for K = 1..k_max.
std::vector<std::pair<int, double>> scree(std::span<const BivariatePoint> points, int k_max,
                                          const KlinesConfig& config = {});

/// AIC of the hard-assignment Gaussian mixture implied by a fit:
/// 2(6K-1) - 2 sum_i log sum_k p_k phi(point_i; mu_k, Sigma_k).
/// Requires every cluster to have >= 3 points; cluster covariances get a
/// 1e-10 * trace/2 diagonal regularization before inversion.
double aic(std::span<const BivariatePoint> points, const FitResult& fit);

/// argmin_K AIC over K = 1..k_max, skipping K whose fit violates the AIC
/// preconditions; ties go to the smaller K.
int select_k_aic(std::span<const BivariatePoint> points, int k_max, const KlinesConfig& config = {});

}  // namespace gpcs
