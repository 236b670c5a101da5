#include "gpcs/simgen.hpp"

#include <algorithm>
#include <cmath>

#include "gpcs/parallel.hpp"
#include "gpcs/rng.hpp"

namespace gpcs {

void MixtureSpec::validate() const {
  if (components.empty()) {
    throw Error(errc::invalid_argument, "MixtureSpec: needs at least one component");
  }
  double sum = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || c.weight > 1.0 + 1e-12) {
      throw Error(errc::invalid_argument, "MixtureSpec: weights must lie in (0,1]");
    }
    sum += c.weight;
    if (!(c.sxx > 0.0) || !(c.syy > 0.0) || !(c.sxx * c.syy - c.sxy * c.sxy > 0.0)) {
      throw Error(errc::invalid_argument, "MixtureSpec: shape matrix must be SPD");
    }
    if (c.family == Family::StudentT && !(c.dof > 2.0)) {
      throw Error(errc::invalid_argument, "MixtureSpec: StudentT needs dof > 2");
    }
    if (c.family == Family::Gaussian && c.dof != 0.0) {
      throw Error(errc::invalid_argument, "MixtureSpec: dof only valid for StudentT");
    }
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(errc::invalid_argument, "MixtureSpec: weights must sum to 1");
  }
}

bool MixtureSpec::all_gaussian() const {
  return std::all_of(components.begin(), components.end(),
                     [](const MixtureComponent& c) { return c.family == Family::Gaussian; });
}

namespace {

MixtureComponent comp(double w, double mx, double my, double rho, Family fam, double dof) {
  MixtureComponent c;
  c.weight = w;
  c.mean_x = mx;
  c.mean_y = my;
  c.sxx = 1.0;
  c.syy = 1.0;
  c.sxy = rho;
  c.family = fam;
  c.dof = dof;
  return c;
}

MixtureSpec make_setting(int id, Family fam, double dof) {
  MixtureSpec s;
  switch (id) {
    case 1:
      s.components = {comp(0.5, 0.0, -2.0, 0.8, fam, dof), comp(0.5, 0.0, 2.0, 0.8, fam, dof)};
      break;
    case 2:
      s.components = {comp(0.5, 0.0, 0.0, 0.8, fam, dof), comp(0.5, 0.0, 0.0, -0.8, fam, dof)};
      break;
    case 3:
      s.components = {comp(0.3, 0.0, -2.0, 0.8, fam, dof), comp(0.7, 0.0, 2.0, -0.8, fam, dof)};
      break;
    case 4:
      s.components = {comp(0.25, 0.0, -2.0, 0.8, fam, dof), comp(0.5, 0.0, 6.0, -0.7, fam, dof),
                      comp(0.25, -2.0, 2.0, 0.9, fam, dof)};
      break;
    default:
      break;
  }
  return s;
}

}  // namespace

MixtureSpec builtin_setting(int id) {
  if (id < 1 || id > 8) {
    throw Error(errc::unknown_setting, "builtin_setting: id must lie in 1..8");
  }
  MixtureSpec s = (id <= 4) ? make_setting(id, Family::Gaussian, 0.0)
                            : make_setting(id - 4, Family::StudentT, 8.0);
  s.validate();
  return s;
}

namespace {

struct Chol2 {
  double l11, l21, l22;
};

Chol2 cholesky(const MixtureComponent& c) {
  const double l11 = std::sqrt(c.sxx);
  const double l21 = c.sxy / l11;
  return Chol2{l11, l21, std::sqrt(std::max(0.0, c.syy - l21 * l21))};
}

}  // namespace

BivariateSample sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed,
                               bool with_labels) {
  spec.validate();
  if (n < 1) throw Error(errc::invalid_argument, "sample_mixture: n must be >= 1");

  std::vector<Chol2> chol;
  chol.reserve(spec.components.size());
  for (const auto& c : spec.components) chol.push_back(cholesky(c));

  Rng rng(seed);
  std::vector<BivariatePoint> points(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    std::size_t k = spec.components.size() - 1;
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < spec.components.size(); ++j) {
      cum += spec.components[j].weight;
      if (u < cum) {
        k = j;
        break;
      }
    }
    const auto& c = spec.components[k];
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    double gx = chol[k].l11 * z1;
    double gy = chol[k].l21 * z1 + chol[k].l22 * z2;
    if (c.family == Family::StudentT) {
      const double scale = std::sqrt(c.dof / rng.chi_squared(c.dof));
      gx *= scale;
      gy *= scale;
    }
    points[i] = BivariatePoint{c.mean_x + gx, c.mean_y + gy};
    labels[i] = static_cast<int>(k) + 1;
  }
  if (with_labels) return BivariateSample(std::move(points), std::move(labels));
  return BivariateSample(std::move(points));
}

double population_rho2_gs(const MixtureSpec& spec) {
  spec.validate();
  double total = 0.0;
  for (const auto& c : spec.components) {
    const double rho2 = (c.sxy * c.sxy) / (c.sxx * c.syy);
    total += c.weight * rho2;
  }
  return total;
}

double population_rho2_gu_mc(const MixtureSpec& spec, std::size_t big_n, int k,
                             std::uint64_t seed, const KlinesConfig& config) {
  if (big_n < 10000) {
    throw Error(errc::invalid_argument, "population_rho2_gu_mc: big_n must be >= 10000");
  }
  const BivariateSample sample = sample_mixture(spec, big_n, seed, false);
  KlinesConfig cfg = config;
  cfg.seed = derive_seed(seed, 0x74617267ULL);
  return r2_gu(sample.points(), k, cfg).value;
}

ComponentSummary population_component_summary(const MixtureComponent& c) {
  if (c.family == Family::StudentT && !(c.dof > 4.0)) {
    throw Error(errc::missing_moments,
                "population_component_summary: StudentT fourth moments need dof > 4");
  }
  const double rho = c.sxy / std::sqrt(c.sxx * c.syy);
  // Fourth standardized moments: Gaussian identities, scaled by
  // (dof-2)/(dof-4) for Student-t.
  const double scale = c.family == Family::StudentT ? (c.dof - 2.0) / (c.dof - 4.0) : 1.0;
  const double var_scale = c.family == Family::StudentT ? c.dof / (c.dof - 2.0) : 1.0;

  ComponentSummary s;
  s.weight = c.weight;
  s.n = 0;
  s.mean_x = c.mean_x;
  s.mean_y = c.mean_y;
  s.var_x = var_scale * c.sxx;
  s.var_y = var_scale * c.syy;
  s.cov_xy = var_scale * c.sxy;
  s.rho2 = rho * rho;
  for (int cc = 0; cc <= 4; ++cc) {
    for (int dd = 0; cc + dd <= 4; ++dd) s.std_moments[{cc, dd}] = 0.0;
  }
  s.std_moments[{0, 0}] = 1.0;
  s.std_moments[{2, 0}] = 1.0;
  s.std_moments[{0, 2}] = 1.0;
  s.std_moments[{1, 1}] = rho;
  s.std_moments[{4, 0}] = 3.0 * scale;
  s.std_moments[{0, 4}] = 3.0 * scale;
  s.std_moments[{3, 1}] = 3.0 * rho * scale;
  s.std_moments[{1, 3}] = 3.0 * rho * scale;
  s.std_moments[{2, 2}] = (1.0 + 2.0 * rho * rho) * scale;
  return s;
}

double specified_asymptotic_variance(const MixtureSpec& spec) {
  spec.validate();
  std::vector<ComponentSummary> comps;
  comps.reserve(spec.components.size());
  for (const auto& c : spec.components) comps.push_back(population_component_summary(c));
  return asy_var_general(comps);
}

std::string to_string(CiMethodKind m) {
  switch (m) {
    case CiMethodKind::Asymp: return "asymp";
    case CiMethodKind::P1: return "p1";
    case CiMethodKind::P2: return "p2";
    case CiMethodKind::Bootstrap: return "bootstrap";
  }
  return "?";
}

std::string to_string(Scenario s) {
  return s == Scenario::Specified ? "specified" : "unspecified";
}

std::vector<CoverageReport> coverage_experiment(const MixtureSpec& spec,
                                                const CoverageOptions& options, int setting_id) {
  spec.validate();
  if (options.reps < 100) {
    throw Error(errc::invalid_argument, "coverage_experiment: need reps >= 100");
  }
  if (options.methods.empty()) {
    throw Error(errc::invalid_argument, "coverage_experiment: no CI methods requested");
  }
  const int true_k = spec.k();

  // Population target, and the true-parameter variance for the Asymp
  // method. The unspecified-scenario target has no closed form; one large
  // sample approximates both the target and the variance parameters,
  // shared by every replicate.
  double target = 0.0;
  double true_variance = 0.0;
  if (options.scenario == Scenario::Specified) {
    target = population_rho2_gs(spec);
    true_variance = specified_asymptotic_variance(spec);
  } else {
    const std::uint64_t big_seed = derive_seed(options.seed, 0x62696773ULL);
    const BivariateSample big = sample_mixture(spec, options.target_big_n, big_seed, false);
    KlinesConfig cfg = options.klines;
    cfg.seed = derive_seed(big_seed, 1);
    cfg.threads = options.threads;
    const GcsEstimate big_est = r2_gu(big.points(), true_k, cfg);
    target = big_est.value;
    if (spec.all_gaussian()) {
      std::vector<double> w, r2;
      for (const auto& c : big_est.components) {
        w.push_back(c.weight);
        r2.push_back(c.rho2);
      }
      true_variance = asy_var_gaussian(w, r2);
    } else {
      true_variance = asy_var_general(big_est.components);
    }
  }

  const double z = normal_quantile(0.5 * (1.0 + options.level));
  const double true_se_unit = std::sqrt(true_variance);

  const std::size_t reps = static_cast<std::size_t>(options.reps);
  const std::size_t n_methods = options.methods.size();
  // covered[r * n_methods + m] in {0,1}; failed[r] marks the replicate.
  std::vector<char> covered(reps * n_methods, 0);
  std::vector<char> failed(reps, 0);

  parallel_for(reps, options.threads, [&](std::size_t r) {
    try {
      const std::uint64_t rep_seed = derive_seed(options.seed, r);
      const BivariateSample sample = sample_mixture(spec, options.n, rep_seed, true);

      GcsEstimate est;
      if (options.scenario == Scenario::Specified) {
        est = r2_gs(sample);
      } else {
        int fit_k = true_k;
        KlinesConfig cfg = options.klines;
        cfg.seed = derive_seed(rep_seed, 2);
        cfg.threads = 1;
        if (options.use_aic_k) fit_k = select_k_aic(sample.points(), options.k_max, cfg);
        est = r2_gu(sample.points(), fit_k, cfg);
      }

      for (std::size_t m = 0; m < n_methods; ++m) {
        double lower = 0.0, upper = 0.0;
        switch (options.methods[m]) {
          case CiMethodKind::Asymp: {
            const double se = true_se_unit / std::sqrt(static_cast<double>(options.n));
            lower = est.value - z * se;
            upper = est.value + z * se;
            break;
          }
          case CiMethodKind::P1: {
            const ConfidenceInterval ci =
                plugin_ci(est, options.n, options.level, VarianceVariant::GaussianClosedForm);
            lower = ci.lower;
            upper = ci.upper;
            break;
          }
          case CiMethodKind::P2: {
            const ConfidenceInterval ci =
                plugin_ci(est, options.n, options.level, VarianceVariant::GeneralMoments);
            lower = ci.lower;
            upper = ci.upper;
            break;
          }
          case CiMethodKind::Bootstrap: {
            BootstrapOptions bo;
            bo.replicates = options.bootstrap_replicates;
            bo.mode = spec.all_gaussian() ? BootstrapMode::Parametric
                                          : BootstrapMode::Nonparametric;
            bo.level = options.level;
            bo.seed = derive_seed(rep_seed, 3);
            bo.threads = 1;
            bo.klines = options.klines;
            const BootstrapCi bc = bootstrap_ci(sample, est, bo);
            lower = bc.ci.lower;
            upper = bc.ci.upper;
            break;
          }
        }
        covered[r * n_methods + m] = (lower <= target && target <= upper) ? 1 : 0;
      }
    } catch (const Error&) {
      failed[r] = 1;  // counts as uncovered for every method
    }
  });

  int failures = 0;
  for (char f : failed) failures += f;

  std::vector<CoverageReport> reports;
  reports.reserve(n_methods);
  for (std::size_t m = 0; m < n_methods; ++m) {
    long covered_count = 0;
    for (std::size_t r = 0; r < reps; ++r) covered_count += covered[r * n_methods + m];
    CoverageReport rep;
    rep.setting_id = setting_id;
    rep.n = options.n;
    rep.reps = options.reps;
    rep.scenario = options.scenario;
    rep.method = options.methods[m];
    rep.coverage = static_cast<double>(covered_count) / static_cast<double>(options.reps);
    rep.target = target;
    rep.failures = failures;
    reports.push_back(rep);
  }
  return reports;
}

}  // namespace gpcs
