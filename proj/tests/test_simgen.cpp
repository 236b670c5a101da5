#include <doctest.h>

#include <cmath>
#include <vector>

#include "gpcs/rng.hpp"
#include "gpcs/simgen.hpp"

using namespace gpcs;

TEST_CASE("builtin settings carry the documented parameters") {
  const MixtureSpec s1 = builtin_setting(1);
  REQUIRE(s1.components.size() == 2);
  CHECK(s1.components[0].weight == 0.5);
  CHECK(s1.components[0].mean_y == -2.0);
  CHECK(s1.components[1].mean_y == 2.0);
  CHECK(s1.components[0].sxy == 0.8);
  CHECK(s1.components[1].sxy == 0.8);
  CHECK(s1.all_gaussian());

  const MixtureSpec s4 = builtin_setting(4);
  REQUIRE(s4.components.size() == 3);
  CHECK(s4.components[0].weight == 0.25);
  CHECK(s4.components[1].weight == 0.5);
  CHECK(s4.components[1].mean_y == 6.0);
  CHECK(s4.components[1].sxy == -0.7);
  CHECK(s4.components[2].mean_x == -2.0);
  CHECK(s4.components[2].sxy == 0.9);

  const MixtureSpec s5 = builtin_setting(5);
  CHECK_FALSE(s5.all_gaussian());
  CHECK(s5.components[0].family == Family::StudentT);
  CHECK(s5.components[0].dof == 8.0);
  CHECK(s5.components[0].mean_y == -2.0);
  CHECK(s5.components[0].sxy == 0.8);

  CHECK_THROWS_AS(builtin_setting(9), Error);
  CHECK_THROWS_AS(builtin_setting(0), Error);
}

TEST_CASE("mixture spec validation") {
  MixtureSpec bad;
  bad.components.push_back({0.7, 0, 0, 1, 0, 1, Family::Gaussian, 0});
  CHECK_THROWS_AS(bad.validate(), Error);  // weights must sum to 1

  MixtureSpec non_spd;
  non_spd.components.push_back({1.0, 0, 0, 1, 1.2, 1, Family::Gaussian, 0});
  CHECK_THROWS_AS(non_spd.validate(), Error);

  MixtureSpec t_no_dof;
  t_no_dof.components.push_back({1.0, 0, 0, 1, 0, 1, Family::StudentT, 0});
  CHECK_THROWS_AS(t_no_dof.validate(), Error);
}

TEST_CASE("sample_mixture is bit-identical for a fixed seed") {
  const MixtureSpec spec = builtin_setting(7);
  const auto a = sample_mixture(spec, 500, 12345, true);
  const auto b = sample_mixture(spec, 500, 12345, true);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.points()[i].x == b.points()[i].x);
    CHECK(a.points()[i].y == b.points()[i].y);
    CHECK(a.labels()[i] == b.labels()[i]);
  }
  const auto c = sample_mixture(spec, 500, 54321, true);
  CHECK(c.points()[0].x != a.points()[0].x);
}

TEST_CASE("generator moments match every Table-1-style setting") {
  const std::size_t n = 200000;
  for (int id = 1; id <= 8; ++id) {
    const MixtureSpec spec = builtin_setting(id);
    const auto sample = sample_mixture(spec, n, derive_seed(42, static_cast<std::uint64_t>(id)),
                                       true);
    const int k = spec.k();
    std::vector<double> sx(k, 0), sy(k, 0), sxx(k, 0), syy(k, 0), sxy(k, 0);
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int z = sample.labels()[i] - 1;
      const auto& p = sample.points()[i];
      ++cnt[z];
      sx[z] += p.x;
      sy[z] += p.y;
    }
    for (int j = 0; j < k; ++j) {
      sx[j] /= static_cast<double>(cnt[j]);
      sy[j] /= static_cast<double>(cnt[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int z = sample.labels()[i] - 1;
      const auto& p = sample.points()[i];
      sxx[z] += (p.x - sx[z]) * (p.x - sx[z]);
      syy[z] += (p.y - sy[z]) * (p.y - sy[z]);
      sxy[z] += (p.x - sx[z]) * (p.y - sy[z]);
    }
    for (int j = 0; j < k; ++j) {
      const auto& c = spec.components[static_cast<std::size_t>(j)];
      const double nk = static_cast<double>(cnt[j]);
      // weights: binomial MC error
      const double w_se = std::sqrt(c.weight * (1 - c.weight) / static_cast<double>(n));
      CHECK(std::abs(nk / static_cast<double>(n) - c.weight) <= 3.0 * w_se);
      // means: the marginal sd is sqrt(var); t inflates by dof/(dof-2)
      const double vscale = c.family == Family::StudentT ? c.dof / (c.dof - 2.0) : 1.0;
      CHECK(std::abs(sx[j] - c.mean_x) <= 3.0 * std::sqrt(vscale * c.sxx / nk));
      CHECK(std::abs(sy[j] - c.mean_y) <= 3.0 * std::sqrt(vscale * c.syy / nk));
      // shape correlation; t kurtosis inflates the correlation MC error
      const double rho = c.sxy / std::sqrt(c.sxx * c.syy);
      const double kurt = c.family == Family::StudentT ? (c.dof - 2.0) / (c.dof - 4.0) : 1.0;
      const double r_hat = sxy[j] / std::sqrt(sxx[j] * syy[j]);
      const double r_se = (1 - rho * rho) * std::sqrt(kurt / nk);
      CHECK(std::abs(r_hat - rho) <= 3.0 * r_se);
    }
  }
}

TEST_CASE("student-t components have the documented fourth moment") {
  MixtureSpec spec;
  spec.components.push_back({1.0, 0, 0, 1, 0, 1, Family::StudentT, 8.0});
  const auto sample = sample_mixture(spec, 200000, 777, false);
  double m = 0, v = 0, m4 = 0;
  const double n = 200000.0;
  for (const auto& p : sample.points()) m += p.x;
  m /= n;
  for (const auto& p : sample.points()) v += (p.x - m) * (p.x - m);
  v /= n;
  for (const auto& p : sample.points()) {
    const double z = (p.x - m) / std::sqrt(v);
    m4 += z * z * z * z;
  }
  m4 /= n;
  CHECK(std::abs(m4 - 4.5) <= 0.3);  // 3(dof-2)/(dof-4) at dof 8
}

TEST_CASE("single-component identity-covariance sanity") {
  MixtureSpec spec;
  spec.components.push_back({1.0, 3.0, -1.0, 1, 0, 1, Family::Gaussian, 0});
  const auto sample = sample_mixture(spec, 100000, 31, false);
  double mx = 0, my = 0;
  for (const auto& p : sample.points()) {
    mx += p.x;
    my += p.y;
  }
  mx /= 100000.0;
  my /= 100000.0;
  CHECK(std::abs(mx - 3.0) <= 0.02);
  CHECK(std::abs(my + 1.0) <= 0.02);
}

TEST_CASE("population_rho2_gs closed forms") {
  CHECK(population_rho2_gs(builtin_setting(2)) == doctest::Approx(0.64).epsilon(1e-15));
  CHECK(population_rho2_gs(builtin_setting(4)) == doctest::Approx(0.6075).epsilon(1e-15));
  CHECK(population_rho2_gs(builtin_setting(6)) == doctest::Approx(0.64).epsilon(1e-15));
  MixtureSpec indep;
  indep.components.push_back({1.0, 0, 0, 1, 0, 1, Family::Gaussian, 0});
  CHECK(population_rho2_gs(indep) == 0.0);
}

TEST_CASE("population_component_summary carries exact moments") {
  MixtureComponent g{0.4, 1.0, 2.0, 4.0, 1.6, 1.0, Family::Gaussian, 0};
  const ComponentSummary s = population_component_summary(g);
  const double rho = 1.6 / 2.0;
  CHECK(s.weight == 0.4);
  CHECK(s.rho2 == doctest::Approx(rho * rho).epsilon(1e-15));
  CHECK(s.moment(1, 1) == doctest::Approx(rho).epsilon(1e-15));
  CHECK(s.moment(4, 0) == 3.0);
  CHECK(s.moment(2, 2) == doctest::Approx(1 + 2 * rho * rho).epsilon(1e-15));

  MixtureComponent t8 = g;
  t8.family = Family::StudentT;
  t8.dof = 8.0;
  const ComponentSummary st = population_component_summary(t8);
  CHECK(st.moment(4, 0) == doctest::Approx(4.5).epsilon(1e-15));
  CHECK(st.moment(3, 1) == doctest::Approx(3 * rho * 1.5).epsilon(1e-15));
  CHECK(st.moment(1, 1) == doctest::Approx(rho).epsilon(1e-15));

  MixtureComponent t3 = g;
  t3.family = Family::StudentT;
  t3.dof = 3.0;  // fourth moments do not exist
  CHECK_THROWS_AS(population_component_summary(t3), Error);
}

TEST_CASE("specified asymptotic variance reduces as expected") {
  // Settings 1 and 2 both have p=(1/2,1/2), rho2=(0.64,0.64): the closed
  // form collapses to the single-component value 4*0.64*0.36^2.
  CHECK(specified_asymptotic_variance(builtin_setting(1)) ==
        doctest::Approx(0.331776).epsilon(1e-12));
  CHECK(specified_asymptotic_variance(builtin_setting(2)) ==
        doctest::Approx(0.331776).epsilon(1e-12));
  // The t version is strictly larger (heavier tails).
  CHECK(specified_asymptotic_variance(builtin_setting(5)) > 0.331776);
}

TEST_CASE("population_rho2_gu_mc is stable and dominates the specified target") {
  const MixtureSpec spec = builtin_setting(1);
  KlinesConfig cfg;
  cfg.seed = 2;
  const double a = population_rho2_gu_mc(spec, 10000, 2, 100, cfg);
  const double b = population_rho2_gu_mc(spec, 10000, 2, 200, cfg);
  CHECK(std::abs(a - b) <= 0.01);
  CHECK(a >= population_rho2_gs(spec) - 0.01);
  CHECK_THROWS_AS(population_rho2_gu_mc(spec, 500, 2, 1, cfg), Error);

  // A nearly rank-1 shape matrix concentrates on its major axis.
  MixtureSpec thin;
  thin.components.push_back({0.5, 0, -2, 1, 0.99999, 1, Family::Gaussian, 0});
  thin.components.push_back({0.5, 0, 2, 1, -0.99999, 1, Family::Gaussian, 0});
  CHECK(population_rho2_gu_mc(thin, 10000, 2, 3, cfg) >= 0.999);
}

TEST_CASE("coverage_experiment reproduces Table-2-style specified cells") {
  CoverageOptions opts;
  opts.n = 100;
  opts.reps = 1000;
  opts.scenario = Scenario::Specified;
  opts.methods = {CiMethodKind::Asymp, CiMethodKind::P1};
  opts.seed = 6060;
  opts.threads = 2;
  const auto reports = coverage_experiment(builtin_setting(1), opts, 1);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].method == CiMethodKind::Asymp);
  CHECK(std::abs(reports[0].coverage - 0.959) <= 0.03);
  CHECK(std::abs(reports[1].coverage - 0.947) <= 0.04);
  CHECK(reports[0].target == doctest::Approx(0.64).epsilon(1e-12));
  CHECK(reports[0].failures == 0);
  // coverage is an exact ratio of integers over reps
  const double scaled = reports[1].coverage * 1000.0;
  CHECK(std::abs(scaled - std::round(scaled)) <= 1e-9);
}

TEST_CASE("a CI stretched to the whole range covers every replicate") {
  CoverageOptions opts;
  opts.n = 100;
  opts.reps = 200;
  opts.scenario = Scenario::Specified;
  opts.methods = {CiMethodKind::Asymp};
  opts.seed = 11;
  opts.level = 1.0 - 1e-13;  // z ~ 7.4: the oracle-CI sanity check
  const auto reports = coverage_experiment(builtin_setting(2), opts, 2);
  CHECK(reports[0].coverage == 1.0);
}

TEST_CASE("coverage_experiment validates inputs") {
  CoverageOptions opts;
  opts.reps = 10;
  CHECK_THROWS_AS(coverage_experiment(builtin_setting(1), opts, 1), Error);
  opts.reps = 100;
  opts.methods.clear();
  CHECK_THROWS_AS(coverage_experiment(builtin_setting(1), opts, 1), Error);
}
