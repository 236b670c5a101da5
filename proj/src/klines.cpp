#include "gpcs/klines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpcs/parallel.hpp"
#include "gpcs/rng.hpp"

namespace gpcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> assign_impl(std::span<const BivariatePoint> points, const LineSet& lines,
                             double* objective) {
  std::vector<int> labels(points.size());
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = kInf;
    int best_k = 1;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      const double d = perp_distance(points[i], lines[k]);
      if (d < best) {
        best = d;
        best_k = static_cast<int>(k) + 1;
      }
    }
    labels[i] = best_k;
    total += best * best;
  }
  if (objective) *objective = total / static_cast<double>(points.size());
  return labels;
}

/// Line for one cluster's points. Identical points (including singletons)
/// get the line through that point in direction (1,0), which attains the
/// zero within-cluster objective; under Drop the degeneracy is an error.
Line fit_cluster_line(std::span<const BivariatePoint> points, const std::vector<std::size_t>& idx,
                      EmptyClusterPolicy policy) {
  std::vector<BivariatePoint> pts;
  pts.reserve(idx.size());
  for (std::size_t i : idx) pts.push_back(points[i]);
  if (pts.size() >= 2) {
    try {
      return major_axis_line(pts);
    } catch (const Error& e) {
      if (e.code() != errc::degenerate_cluster || policy == EmptyClusterPolicy::Drop) throw;
    }
  } else if (policy == EmptyClusterPolicy::Drop) {
    throw Error(errc::degenerate_cluster, "recenter: singleton cluster under Drop policy");
  }
  return Line::through(pts.front(), 1.0, 0.0);
}

Line two_point_line(const BivariatePoint& p, const BivariatePoint& q) {
  const double ux = q.x - p.x;
  const double uy = q.y - p.y;
  if (ux == 0.0 && uy == 0.0) return Line::through(p, 1.0, 0.0);
  return Line::through(p, ux, uy);
}

}  // namespace

double objective_w(std::span<const BivariatePoint> points, const LineSet& lines) {
  if (points.empty() || lines.empty()) {
    throw Error(errc::invalid_argument, "objective_w: need nonempty points and lines");
  }
  double obj = 0.0;
  assign_impl(points, lines, &obj);
  return obj;
}

std::vector<int> assign(std::span<const BivariatePoint> points, const LineSet& lines) {
  if (points.empty() || lines.empty()) {
    throw Error(errc::invalid_argument, "assign: need nonempty points and lines");
  }
  return assign_impl(points, lines, nullptr);
}

LineSet recenter(std::span<const BivariatePoint> points, const std::vector<int>& labels, int k,
                 EmptyClusterPolicy policy) {
  if (k < 1) throw Error(errc::invalid_argument, "recenter: K must be >= 1");
  if (labels.size() != points.size()) {
    throw Error(errc::dimension_mismatch, "recenter: labels/points length mismatch");
  }
  std::vector<std::vector<std::size_t>> clusters(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || labels[i] > k) {
      throw Error(errc::invalid_argument, "recenter: label outside 1..K");
    }
    clusters[static_cast<std::size_t>(labels[i]) - 1].push_back(i);
  }

  LineSet lines;
  std::vector<std::size_t> empties;
  lines.reserve(static_cast<std::size_t>(k));
  for (std::size_t ck = 0; ck < clusters.size(); ++ck) {
    if (clusters[ck].empty()) {
      if (policy == EmptyClusterPolicy::ReseedFarthest) {
        empties.push_back(lines.size());
        lines.push_back(Line{});  // placeholder, reseeded below
      }
      // Drop: the line is simply omitted and K shrinks.
      continue;
    }
    lines.push_back(fit_cluster_line(points, clusters[ck], policy));
  }
  if (lines.empty()) {
    throw Error(errc::degenerate_cluster, "recenter: no cluster could produce a line");
  }

  if (!empties.empty()) {
    // Re-seed each empty cluster with a 2-point cluster around the point
    // farthest from the current lines (its nearest Euclidean neighbour
    // completes the pair). Anchors are not reused across empty clusters.
    std::vector<char> is_anchor(points.size(), 0);
    std::vector<char> is_placeholder(lines.size(), 0);
    for (std::size_t e : empties) is_placeholder[e] = 1;
    for (std::size_t e : empties) {
      double worst = -1.0;
      std::size_t anchor = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (is_anchor[i]) continue;
        double d = kInf;
        for (std::size_t l = 0; l < lines.size(); ++l) {
          if (is_placeholder[l]) continue;
          d = std::min(d, perp_distance(points[i], lines[l]));
        }
        if (d > worst) {
          worst = d;
          anchor = i;
        }
      }
      is_anchor[anchor] = 1;
      double best_sq = kInf;
      std::size_t mate = anchor;
      for (std::size_t j = 0; j < points.size(); ++j) {
        if (j == anchor) continue;
        const double dx = points[j].x - points[anchor].x;
        const double dy = points[j].y - points[anchor].y;
        const double sq = dx * dx + dy * dy;
        if (sq < best_sq) {
          best_sq = sq;
          mate = j;
        }
      }
      lines[e] = (mate == anchor) ? Line::through(points[anchor], 1.0, 0.0)
                                  : two_point_line(points[anchor], points[mate]);
      is_placeholder[e] = 0;
    }
  }
  return lines;
}

namespace {

struct RestartOutcome {
  LineSet lines;
  std::vector<int> labels;
  double objective = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

RestartOutcome run_restart(std::span<const BivariatePoint> points, int k,
                           const KlinesConfig& config, Rng rng) {
  const std::size_t n = points.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);

  std::vector<int> labels(n);
  if (config.init == KlinesInit::RandomPartition) {
    // Random partition into K groups, each guaranteed one point.
    for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
      labels[perm[i]] = static_cast<int>(i) + 1;
    }
    for (std::size_t i = static_cast<std::size_t>(k); i < n; ++i) {
      labels[perm[i]] = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(k)));
    }
  } else {
    // K lines through K random point pairs, then a nearest-line sweep.
    LineSet init_lines;
    init_lines.reserve(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < static_cast<std::size_t>(k); ++j) {
      const std::size_t a = perm[j];
      const std::size_t b = perm[(j + static_cast<std::size_t>(k)) % n];
      init_lines.push_back(a == b ? Line::through(points[a], 1.0, 0.0)
                                  : two_point_line(points[a], points[b]));
    }
    labels = assign_impl(points, init_lines, nullptr);
  }

  RestartOutcome out;
  int current_k = k;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    LineSet lines = recenter(points, labels, current_k, config.empty_cluster_policy);
    double obj = 0.0;
    std::vector<int> new_labels = assign_impl(points, lines, &obj);
    if (config.record_trajectories) out.trace.push_back(obj);
    out.iterations = iter;
    const bool k_changed = lines.size() != static_cast<std::size_t>(current_k);
    current_k = static_cast<int>(lines.size());
    const bool changed = k_changed || new_labels != labels;
    labels = std::move(new_labels);
    out.lines = std::move(lines);
    out.objective = obj;
    if (!changed) {
      out.converged = true;
      break;
    }
  }
  out.labels = std::move(labels);
  return out;
}

}  // namespace

FitResult klines_fit(std::span<const BivariatePoint> points, int k, const KlinesConfig& config) {
  if (k < 1) throw Error(errc::invalid_argument, "klines_fit: K must be >= 1");
  if (config.restarts < 1 || config.max_iterations < 1) {
    throw Error(errc::invalid_argument, "klines_fit: restarts and max_iterations must be >= 1");
  }
  if (points.size() < static_cast<std::size_t>(k)) {
    throw Error(errc::insufficient_data, "klines_fit: fewer points than lines requested");
  }

  std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(config.restarts));
  parallel_for(outcomes.size(), config.threads, [&](std::size_t r) {
    outcomes[r] = run_restart(points, k, config, Rng::stream(config.seed, r));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < outcomes.size(); ++r) {
    if (outcomes[r].objective < outcomes[best].objective) best = r;
  }

  FitResult fit;
  fit.lines = std::move(outcomes[best].lines);
  fit.labels = std::move(outcomes[best].labels);
  fit.objective = outcomes[best].objective;
  fit.iterations = outcomes[best].iterations;
  fit.restarts_run = config.restarts;
  fit.converged = outcomes[best].converged;
  if (config.record_trajectories) {
    fit.trajectories.reserve(outcomes.size());
    for (auto& o : outcomes) fit.trajectories.push_back(std::move(o.trace));
  }
  return fit;
}

std::vector<std::pair<int, double>> scree(std::span<const BivariatePoint> points, int k_max,
                                          const KlinesConfig& config) {
  if (k_max < 1) throw Error(errc::invalid_argument, "scree: k_max must be >= 1");
  if (static_cast<std::size_t>(k_max) > points.size()) {
    throw Error(errc::insufficient_data, "scree: k_max exceeds sample size");
  }
  std::vector<std::pair<int, double>> out;
  out.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    out.emplace_back(k, klines_fit(points, k, config).objective);
  }
  return out;
}

double aic(std::span<const BivariatePoint> points, const FitResult& fit) {
  const std::size_t k = fit.lines.size();
  if (fit.labels.size() != points.size()) {
    throw Error(errc::dimension_mismatch, "aic: fit does not match the point set");
  }

  struct Comp {
    double log_weight, mean_x, mean_y;
    double inv_xx, inv_xy, inv_yy;  // inverse covariance
    double log_norm;                // -log(2*pi) - 0.5*log(det)
  };
  std::vector<std::vector<std::size_t>> clusters(k);
  for (std::size_t i = 0; i < fit.labels.size(); ++i) {
    clusters.at(static_cast<std::size_t>(fit.labels[i]) - 1).push_back(i);
  }

  const double n = static_cast<double>(points.size());
  std::vector<Comp> comps(k);
  for (std::size_t ck = 0; ck < k; ++ck) {
    const auto& idx = clusters[ck];
    if (idx.size() < 3) {
      throw Error(errc::insufficient_data, "aic: every cluster needs at least 3 points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i : idx) {
      mx += points[i].x;
      my += points[i].y;
    }
    const double nk = static_cast<double>(idx.size());
    mx /= nk;
    my /= nk;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i : idx) {
      const double dx = points[i].x - mx;
      const double dy = points[i].y - my;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
    sxx /= nk;
    syy /= nk;
    sxy /= nk;
    const double reg = 1e-10 * 0.5 * (sxx + syy);
    sxx += reg;
    syy += reg;
    const double det = sxx * syy - sxy * sxy;
    if (!(det > 0.0)) {
      throw Error(errc::singular_covariance, "aic: singular cluster covariance");
    }
    comps[ck] = Comp{std::log(nk / n), mx,          my, syy / det, -sxy / det, sxx / det,
                     -std::log(2.0 * 3.14159265358979323846) - 0.5 * std::log(det)};
  }

  double loglik = 0.0;
  for (const auto& p : points) {
    double max_term = -kInf;
    std::vector<double> terms(k);
    for (std::size_t ck = 0; ck < k; ++ck) {
      const Comp& c = comps[ck];
      const double dx = p.x - c.mean_x;
      const double dy = p.y - c.mean_y;
      const double q = c.inv_xx * dx * dx + 2.0 * c.inv_xy * dx * dy + c.inv_yy * dy * dy;
      terms[ck] = c.log_weight + c.log_norm - 0.5 * q;
      max_term = std::max(max_term, terms[ck]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    loglik += max_term + std::log(sum);
  }
  return 2.0 * (6.0 * static_cast<double>(k) - 1.0) - 2.0 * loglik;
}

int select_k_aic(std::span<const BivariatePoint> points, int k_max, const KlinesConfig& config) {
  if (k_max < 1) throw Error(errc::invalid_argument, "select_k_aic: k_max must be >= 1");
  int best_k = 0;
  double best_aic = kInf;
  for (int k = 1; k <= k_max; ++k) {
    if (points.size() < static_cast<std::size_t>(k)) break;
    double value = 0.0;
    try {
      value = aic(points, klines_fit(points, k, config));
    } catch (const Error& e) {
      if (e.code() == errc::insufficient_data || e.code() == errc::singular_covariance ||
          e.code() == errc::degenerate_cluster) {
        continue;  // this K fails the AIC preconditions
      }
      throw;
    }
    if (value < best_aic) {
      best_aic = value;
      best_k = k;
    }
  }
  if (best_k == 0) {
    throw Error(errc::no_feasible_k, "select_k_aic: no K satisfied the AIC preconditions");
  }
  return best_k;
}

}  // namespace gpcs
