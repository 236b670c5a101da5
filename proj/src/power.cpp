#include "gpcs/power.hpp"

#include <algorithm>
#include <cmath>

#include "gpcs/measures.hpp"
#include "gpcs/parallel.hpp"
#include "gpcs/rng.hpp"

namespace gpcs {

BivariateSample generate_pattern(const PatternSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n < 2) throw Error(errc::invalid_argument, "generate_pattern: need n >= 2");
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) {
    throw Error(errc::invalid_argument, "generate_pattern: sigma must be finite and >= 0");
  }
  Rng rng(seed);
  std::vector<BivariatePoint> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.normal(0.0, spec.x_sd);
    double f = 0.0;
    switch (spec.pattern) {
      case Pattern::Linear:
        f = spec.slope * x;
        break;
      case Pattern::TwoLinesMixedSign:
        f = (rng.uniform() < 0.5 ? spec.slope : -spec.slope) * x;
        break;
      case Pattern::Parabola:
        f = x * x / spec.curve_scale;
        break;
      case Pattern::PiecewiseNonlinearMix:
        f = (rng.uniform() < 0.5 ? 1.0 : -1.0) * x * x / spec.curve_scale;
        break;
      case Pattern::PureNoise:
        f = 0.0;
        break;
    }
    pts[i] = BivariatePoint{x, f + (spec.sigma > 0.0 ? rng.normal(0.0, spec.sigma) : 0.0)};
  }
  return BivariateSample(std::move(pts));
}

double pearson_r2(std::span<const BivariatePoint> points, bool* zero_variance) {
  if (zero_variance) *zero_variance = false;
  if (points.size() < 2) {
    throw Error(errc::insufficient_data, "pearson_r2: need at least 2 points");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(points.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    const double dx = p.x - mx;
    const double dy = p.y - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    if (zero_variance) *zero_variance = true;
    return 0.0;
  }
  return (sxy * sxy) / (sxx * syy);
}

double dcor(std::span<const BivariatePoint> points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(errc::insufficient_data, "dcor: need at least 2 points");

  // Double-centered pairwise distance matrices of the two coordinates.
  auto centered = [n](const std::vector<double>& v) {
    std::vector<double> d(n * n);
    std::vector<double> row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dist = std::abs(v[i] - v[j]);
        d[i * n + j] = dist;
        row_mean[i] += dist;
      }
      grand += row_mean[i];
      row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n) * static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        d[i * n + j] += grand - row_mean[i] - row_mean[j];
      }
    }
    return d;
  };

  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  const std::vector<double> a = centered(xs);
  const std::vector<double> b = centered(ys);

  double vxy = 0.0, vxx = 0.0, vyy = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) {
    vxy += a[i] * b[i];
    vxx += a[i] * a[i];
    vyy += b[i] * b[i];
  }
  const double denom = std::sqrt(vxx * vyy);
  if (!(denom > 0.0)) return 0.0;  // a constant coordinate has zero distance variance
  return std::sqrt(std::max(0.0, vxy) / denom);
}

PowerMeasure measure_pearson_r2() {
  return PowerMeasure{"r2", [](std::span<const BivariatePoint> pts, std::uint64_t) {
                        return pearson_r2(pts);
                      }};
}

PowerMeasure measure_dcor() {
  return PowerMeasure{"dcor",
                      [](std::span<const BivariatePoint> pts, std::uint64_t) { return dcor(pts); }};
}

PowerMeasure measure_r2_gu(int k, const KlinesConfig& config) {
  return PowerMeasure{"gcs_k" + std::to_string(k),
                      [k, config](std::span<const BivariatePoint> pts, std::uint64_t seed) {
                        KlinesConfig cfg = config;
                        cfg.seed = seed;
                        cfg.threads = 1;
                        return r2_gu(pts, k, cfg).value;
                      }};
}

std::vector<PowerReport> permutation_power(const PatternSpec& pattern,
                                           const std::vector<PowerMeasure>& measures,
                                           const PowerOptions& options) {
  if (options.replicates < 200) {
    throw Error(errc::invalid_argument, "permutation_power: need B >= 200");
  }
  if (!(options.alpha > 0.0 && options.alpha < 0.5)) {
    throw Error(errc::invalid_argument, "permutation_power: alpha must lie in (0, 0.5)");
  }
  if (measures.empty()) {
    throw Error(errc::invalid_argument, "permutation_power: no measures given");
  }

  const std::size_t b = static_cast<std::size_t>(options.replicates);
  const std::size_t m = measures.size();
  std::vector<double> alt(b * m), null(b * m);

  parallel_for(b, options.threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(options.seed, r);
    const BivariateSample sample = generate_pattern(pattern, options.n, rep_seed);

    // Null twin: same sample with the Y column permuted.
    Rng rng(derive_seed(rep_seed, 1));
    std::vector<double> perm_y;
    perm_y.reserve(sample.size());
    for (const auto& p : sample.points()) perm_y.push_back(p.y);
    rng.shuffle(perm_y);
    std::vector<BivariatePoint> null_pts = sample.points();
    for (std::size_t i = 0; i < null_pts.size(); ++i) null_pts[i].y = perm_y[i];

    for (std::size_t j = 0; j < m; ++j) {
      alt[r * m + j] = measures[j].eval(sample.points(), derive_seed(rep_seed, 2 + 2 * j));
      null[r * m + j] = measures[j].eval(null_pts, derive_seed(rep_seed, 3 + 2 * j));
    }
  });

  std::vector<PowerReport> reports;
  reports.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> null_vals(b);
    for (std::size_t r = 0; r < b; ++r) null_vals[r] = null[r * m + j];
    std::sort(null_vals.begin(), null_vals.end());
    // (1-alpha) empirical quantile as an order statistic.
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil((1.0 - options.alpha) * static_cast<double>(b)));
    const double threshold = null_vals[std::min(rank, b) - 1];

    std::size_t rejections = 0;
    for (std::size_t r = 0; r < b; ++r) {
      if (alt[r * m + j] > threshold) ++rejections;
    }
    PowerReport rep;
    rep.measure = measures[j].name;
    rep.n = options.n;
    rep.sigma = pattern.sigma;
    rep.alpha = options.alpha;
    rep.threshold = threshold;
    rep.power = static_cast<double>(rejections) / static_cast<double>(b);
    rep.b = options.replicates;
    reports.push_back(std::move(rep));
  }
  return reports;
}

}  // namespace gpcs
