#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpcs/inference.hpp"
#include "gpcs/klines.hpp"
#include "gpcs/measures.hpp"
#include "gpcs/types.hpp"

namespace gpcs {

enum class Family { Gaussian, StudentT };

struct MixtureComponent {
  double weight = 1.0;
  double mean_x = 0.0, mean_y = 0.0;
  double sxx = 1.0, sxy = 0.0, syy = 1.0;  // SPD shape matrix
  Family family = Family::Gaussian;
  double dof = 0.0;  // StudentT only, must exceed 2
};

struct MixtureSpec {
  std::vector<MixtureComponent> components;

  void validate() const;
  int k() const { return static_cast<int>(components.size()); }
  bool all_gaussian() const;
};

/// The eight built-in simulation settings: 1-4 bivariate Gaussian
/// mixtures, 5-8 the same parameters as bivariate t with 8 degrees of
/// freedom.
MixtureSpec builtin_setting(int id);

/// i.i.d. draws from the mixture: component index first, then a Gaussian
/// via the Cholesky factor of the shape matrix, scaled by
/// sqrt(dof / chi^2_dof) for Student-t components. Bit-identical for a
/// given (spec, n, seed).
BivariateSample sample_mixture(const MixtureSpec& spec, std::size_t n, std::uint64_t seed,
                               bool with_labels);

/// Population specified measure, sum_k p_k * rho_k^2, with rho_k read off
/// each shape matrix (shape correlation equals the distribution
/// correlation for both families).
double population_rho2_gs(const MixtureSpec& spec);

/// Monte-Carlo surrogate for the population unspecified measure: r2_gu on
/// one large sample (big_n >= 10000).
double population_rho2_gu_mc(const MixtureSpec& spec, std::size_t big_n, int k,
                             std::uint64_t seed, const KlinesConfig& config = {});

/// Exact per-component standardized moments (Gaussian identities, or the
/// t-scaled versions for StudentT with dof > 4), packaged as a
/// ComponentSummary so the variance formulas can consume population
/// parameters directly.
ComponentSummary population_component_summary(const MixtureComponent& c);

/// True asymptotic variance of sqrt(n) (R2_GS - rho2_GS) under the spec.
double specified_asymptotic_variance(const MixtureSpec& spec);

enum class CiMethodKind { Asymp, P1, P2, Bootstrap };

std::string to_string(CiMethodKind m);
std::string to_string(Scenario s);

struct CoverageOptions {
  std::size_t n = 100;
  int reps = 1000;  // >= 100
  Scenario scenario = Scenario::Specified;
  std::vector<CiMethodKind> methods{CiMethodKind::Asymp, CiMethodKind::P1};
  std::uint64_t seed = 0;
  double level = 0.95;
  unsigned threads = 0;
  std::size_t target_big_n = 10000;  // unspecified-target sample size
  KlinesConfig klines;               // unspecified-scenario fits
  int bootstrap_replicates = 200;    // Bootstrap method only
  bool use_aic_k = false;            // choose K by AIC instead of the true K
  int k_max = 10;                    // search range when use_aic_k is set
};

struct CoverageReport {
  int setting_id = 0;  // 0 for custom specs
  std::size_t n = 0;
  int reps = 0;
  Scenario scenario = Scenario::Specified;
  CiMethodKind method = CiMethodKind::Asymp;
  double coverage = 0.0;  // covered / reps
  double target = 0.0;    // rho2_GS, or the Monte-Carlo rho2_GU surrogate
  int failures = 0;       // replicates whose fit or CI failed (count as uncovered)
};

/// One Monte-Carlo coverage run: `reps` samples of size n, an estimate and
/// the requested CIs per sample, coverage of the population target per
/// method. The same per-replicate sample serves every method.
std::vector<CoverageReport> coverage_experiment(const MixtureSpec& spec,
                                                const CoverageOptions& options,
                                                int setting_id = 0);

}  // namespace gpcs
