#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gpcs/measures.hpp"
#include "gpcs/power.hpp"
#include "gpcs/rng.hpp"
#include "gpcs/simgen.hpp"

using namespace gpcs;

namespace {

std::vector<BivariatePoint> crossing_lines_sample(std::size_t per_line, Rng& rng) {
  std::vector<BivariatePoint> pts;
  while (pts.size() < per_line) {
    const double x = rng.normal(0.0, 2.0);
    if (std::abs(x) > 0.3) pts.push_back({x, x});
  }
  while (pts.size() < 2 * per_line) {
    const double x = rng.normal(0.0, 2.0);
    if (std::abs(x) > 0.3) pts.push_back({x, -x});
  }
  return pts;
}

}  // namespace

TEST_CASE("r2_gs with one class is the squared Pearson correlation") {
  Rng rng(101);
  std::vector<BivariatePoint> pts(60);
  for (auto& p : pts) {
    const double x = rng.normal();
    p = BivariatePoint{x, 0.5 * x + rng.normal(0, 0.8)};
  }
  const BivariateSample sample(pts, std::vector<int>(pts.size(), 1));
  const GcsEstimate est = r2_gs(sample);
  CHECK(est.k == 1);
  CHECK(est.value == doctest::Approx(pearson_r2(pts)).epsilon(1e-12));
}

TEST_CASE("r2_gs is 1 for per-class collinear data") {
  std::vector<BivariatePoint> pts;
  std::vector<int> labels;
  for (int i = 0; i < 5; ++i) {
    pts.push_back({static_cast<double>(i), 2.0 * i + 1.0});
    labels.push_back(1);
    pts.push_back({static_cast<double>(i), -3.0 * i});
    labels.push_back(2);
  }
  const GcsEstimate est = r2_gs(BivariateSample(pts, labels));
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(est.k == 2);
}

TEST_CASE("r2_gs matches a hand-computed six-point example") {
  // Class 1: (0,0), (1,2), (2,3); class 2: (0,1), (1,1.5), (3,4).
  // Direct covariance sums give rho2 = 27/28 and 841/868, so the weighted
  // value is (27/28 + 841/868) / 2 = 839/868.
  const std::vector<BivariatePoint> pts{{0, 0}, {1, 2}, {2, 3}, {0, 1}, {1, 1.5}, {3, 4}};
  const std::vector<int> labels{1, 1, 1, 2, 2, 2};
  const GcsEstimate est = r2_gs(BivariateSample(pts, labels));
  CHECK(est.value == doctest::Approx(839.0 / 868.0).epsilon(1e-12));
  CHECK(est.components[0].rho2 == doctest::Approx(27.0 / 28.0).epsilon(1e-12));
  CHECK(est.components[1].rho2 == doctest::Approx(841.0 / 868.0).epsilon(1e-12));
  // The estimate's invariants: weights sum to 1, value is their blend.
  double wsum = 0.0, blend = 0.0;
  for (const auto& c : est.components) {
    wsum += c.weight;
    blend += c.weight * c.rho2;
  }
  CHECK(std::abs(wsum - 1.0) <= 1e-12);
  CHECK(std::abs(blend - est.value) <= 1e-12);
}

TEST_CASE("r2_gs requires labels; classes with too few points contribute zero") {
  const std::vector<BivariatePoint> pts{{0, 0}, {1, 1}, {2, 2}};
  CHECK_THROWS_AS(r2_gs(BivariateSample(pts)), Error);

  // Singleton class keeps its weight but adds rho2 = 0.
  const GcsEstimate est = r2_gs(BivariateSample(pts, std::vector<int>{1, 1, 2}));
  CHECK(est.value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("labels are remapped by first appearance") {
  const std::vector<BivariatePoint> pts{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const GcsEstimate a = r2_gs(BivariateSample(pts, std::vector<int>{7, 7, 3, 3}));
  const GcsEstimate b = r2_gs(BivariateSample(pts, std::vector<int>{1, 1, 2, 2}));
  CHECK(a.k == 2);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-15));
}

TEST_CASE("label permutation leaves r2_gs unchanged") {
  Rng rng(103);
  std::vector<BivariatePoint> pts(90);
  std::vector<int> labels(90), flipped(90);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    pts[i] = BivariatePoint{rng.normal(), rng.normal()};
    labels[i] = 1 + static_cast<int>(rng.uniform_below(3));
    flipped[i] = 4 - labels[i];  // 1<->3, 2 fixed
  }
  const GcsEstimate a = r2_gs(BivariateSample(pts, labels));
  const GcsEstimate b = r2_gs(BivariateSample(pts, flipped));
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-13));
}

TEST_CASE("r2_gu with K=1 equals the squared Pearson correlation") {
  Rng rng(107);
  std::vector<BivariatePoint> pts(70);
  for (auto& p : pts) {
    const double x = rng.normal();
    p = BivariatePoint{x, -0.9 * x + rng.normal(0, 0.6)};
  }
  const GcsEstimate est = r2_gu(pts, 1, {});
  CHECK(est.value == doctest::Approx(pearson_r2(pts)).epsilon(1e-12));
  CHECK(est.fit.has_value());
}

TEST_CASE("r2_gu on noiseless crossing lines is 1") {
  Rng rng(109);
  const auto pts = crossing_lines_sample(50, rng);
  KlinesConfig cfg;
  cfg.seed = 52;
  const GcsEstimate est = r2_gu(pts, 2, cfg);
  CHECK(est.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("r2_gu tracks the Monte-Carlo population target on Setting 2") {
  const MixtureSpec spec = builtin_setting(2);
  KlinesConfig cfg;
  cfg.seed = 88;
  const double target = population_rho2_gu_mc(spec, 10000, 2, derive_seed(555, 0), cfg);
  const auto sample = sample_mixture(spec, 10000, derive_seed(777, 0), false);
  const GcsEstimate est = r2_gu(sample.points(), 2, cfg);
  CHECK(std::abs(est.value - target) <= 0.02);
}

TEST_CASE("r2_gu dominates r2_gs on large samples (population inequality)") {
  for (int setting : {1, 2}) {
    const auto sample =
        sample_mixture(builtin_setting(setting), 10000,
                       derive_seed(1200, static_cast<std::uint64_t>(setting)), true);
    KlinesConfig cfg;
    cfg.seed = 17;
    const double gu = r2_gu(sample.points(), builtin_setting(setting).k(), cfg).value;
    const double gs = r2_gs(sample).value;
    CHECK(gu >= gs - 0.01);
  }
}

TEST_CASE("adding a line never hurts much: K+1 vs K") {
  const auto sample = sample_mixture(builtin_setting(3), 400, 9001, false);
  KlinesConfig cfg;
  cfg.seed = 41;
  double prev = r2_gu(sample.points(), 1, cfg).value;
  for (int k = 2; k <= 4; ++k) {
    const double cur = r2_gu(sample.points(), k, cfg).value;
    CHECK(cur >= prev - 0.02);
    prev = cur;
  }
}

TEST_CASE("measure values stay in [0,1]") {
  Rng rng(113);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<BivariatePoint> pts(30);
    for (auto& p : pts) p = BivariatePoint{rng.normal(0, 3), rng.normal(0, 3)};
    KlinesConfig cfg;
    cfg.seed = derive_seed(2100, static_cast<std::uint64_t>(rep));
    cfg.restarts = 10;
    const double v = r2_gu(pts, 2, cfg).value;
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("swapping x and y leaves both measures unchanged") {
  const auto sample = sample_mixture(builtin_setting(3), 300, 808, true);
  std::vector<BivariatePoint> swapped;
  swapped.reserve(sample.size());
  for (const auto& p : sample.points()) swapped.push_back({p.y, p.x});

  const double gs = r2_gs(sample).value;
  const double gs_swapped = r2_gs(BivariateSample(swapped, sample.labels())).value;
  CHECK(std::abs(gs - gs_swapped) <= 1e-9);

  KlinesConfig cfg;
  cfg.seed = 19;
  const double gu = r2_gu(sample.points(), 2, cfg).value;
  const double gu_swapped = r2_gu(swapped, 2, cfg).value;
  CHECK(std::abs(gu - gu_swapped) <= 1e-9);
}

TEST_CASE("r2_gs under separate affine maps, r2_gu under scale/translation/flip") {
  const auto sample = sample_mixture(builtin_setting(2), 250, 909, true);
  // r2_gu is invariant for maps that keep the clustering geometry AND the
  // per-class correlation: uniform positive scaling, translation, and axis
  // reflections. Proper rotations change per-class Pearson correlations,
  // so they are excluded on purpose.
  std::vector<BivariatePoint> affine, scaled, x_flipped;
  for (const auto& p : sample.points()) {
    affine.push_back({3.0 * p.x - 1.0, 0.4 * p.y + 9.0});
    scaled.push_back({2.5 * p.x + 4.0, 2.5 * p.y - 2.0});
    x_flipped.push_back({-p.x, p.y});
  }
  CHECK(std::abs(r2_gs(sample).value -
                 r2_gs(BivariateSample(affine, sample.labels())).value) <= 1e-9);

  KlinesConfig cfg;
  cfg.seed = 23;
  const double base = r2_gu(sample.points(), 2, cfg).value;
  CHECK(std::abs(base - r2_gu(scaled, 2, cfg).value) <= 1e-9);
  CHECK(std::abs(base - r2_gu(x_flipped, 2, cfg).value) <= 1e-9);
}

TEST_CASE("r2_gu_auto picks K by AIC") {
  Rng rng(derive_seed(4242, 0));
  std::vector<BivariatePoint> pts(100);
  for (auto& p : pts) {
    const double x = rng.normal(0, 2);
    p = BivariatePoint{x, 0.8 * x + rng.normal(0, 0.3)};
  }
  KlinesConfig cfg;
  cfg.seed = derive_seed(29, 0);
  const GcsEstimate linear = r2_gu_auto(pts, 8, cfg);
  CHECK(linear.k == 1);
  CHECK(linear.value == doctest::Approx(pearson_r2(pts)).epsilon(1e-12));

  const auto s3 = sample_mixture(builtin_setting(3), 100, 2026, false);
  CHECK(r2_gu_auto(s3.points(), 10, cfg).k == 2);
  const auto s8 = sample_mixture(builtin_setting(8), 100, 31310, false);
  CHECK(r2_gu_auto(s8.points(), 10, cfg).k == 3);
}
