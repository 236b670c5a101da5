#include "gpcs/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpcs/inference.hpp"
#include "gpcs/klines.hpp"
#include "gpcs/measures.hpp"
#include "gpcs/parallel.hpp"
#include "gpcs/power.hpp"
#include "gpcs/rng.hpp"
#include "gpcs/simgen.hpp"
#include "gpcs/table.hpp"

namespace gpcs {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 success, 2 invalid args, 3 I/O, 4 parse, 5 numerical,
// 6 non-convergence result suppressed under --strict.
int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::invalid_argument:
    case errc::unknown_setting:
    case errc::missing_labels:
    case errc::dimension_mismatch:
      return 2;
    case errc::io_error:
      return 3;
    case errc::parse_error:
    case errc::missing_column:
    case errc::invalid_sample:
      return 4;
    case errc::non_convergence:
      return 6;
    default:
      return 5;  // degenerate / singular / insufficient-data class
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
  out << text;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("GPCS_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw Error(errc::invalid_argument, "GPCS_SEED is not an unsigned integer");
    }
  }
  return 0;
}

json component_to_json(const ComponentSummary& c) {
  return json{{"weight", c.weight},   {"n", c.n},         {"mean_x", c.mean_x},
              {"mean_y", c.mean_y},   {"var_x", c.var_x}, {"var_y", c.var_y},
              {"cov_xy", c.cov_xy},   {"rho2", c.rho2}};
}

json ci_to_json(const ConfidenceInterval& ci) {
  json j{{"lower", ci.lower},
         {"upper", ci.upper},
         {"lower_clamped", ci.clamped_lower()},
         {"upper_clamped", ci.clamped_upper()},
         {"level", ci.level},
         {"se", ci.se},
         {"method", ci.method == CiMethod::Bootstrap ? "bootstrap" : "plugin"}};
  if (ci.variant) {
    j["variant"] = *ci.variant == VarianceVariant::GaussianClosedForm ? "p1" : "p2";
  }
  return j;
}

// ---- mixture-spec JSON (cmd_simulate --spec) -------------------------------

MixtureSpec spec_from_json(const json& j) {
  MixtureSpec spec;
  if (!j.contains("components") || !j["components"].is_array()) {
    throw Error(errc::parse_error, "mixture spec: missing 'components' array");
  }
  for (const auto& cj : j["components"]) {
    MixtureComponent c;
    c.weight = cj.at("weight").get<double>();
    c.mean_x = cj.at("mean").at(0).get<double>();
    c.mean_y = cj.at("mean").at(1).get<double>();
    c.sxx = cj.at("shape").at(0).at(0).get<double>();
    c.sxy = cj.at("shape").at(0).at(1).get<double>();
    c.syy = cj.at("shape").at(1).at(1).get<double>();
    const double s21 = cj.at("shape").at(1).at(0).get<double>();
    if (s21 != c.sxy) {
      throw Error(errc::parse_error, "mixture spec: shape matrix must be symmetric");
    }
    const std::string family = cj.value("family", "gaussian");
    if (family == "gaussian") {
      c.family = Family::Gaussian;
    } else if (family == "student_t") {
      c.family = Family::StudentT;
      c.dof = cj.at("dof").get<double>();
    } else {
      throw Error(errc::parse_error, "mixture spec: unknown family '" + family + "'");
    }
    spec.components.push_back(c);
  }
  spec.validate();
  return spec;
}

json spec_to_json(const MixtureSpec& spec) {
  json comps = json::array();
  for (const auto& c : spec.components) {
    json cj{{"weight", c.weight},
            {"mean", {c.mean_x, c.mean_y}},
            {"shape", {{c.sxx, c.sxy}, {c.sxy, c.syy}}},
            {"family", c.family == Family::Gaussian ? "gaussian" : "student_t"}};
    if (c.family == Family::StudentT) cj["dof"] = c.dof;
    comps.push_back(cj);
  }
  return json{{"components", comps}};
}

MixtureSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(errc::parse_error, std::string("mixture spec: ") + e.what());
  }
  return spec_from_json(j);
}

// ---- shared option plumbing -------------------------------------------------

struct CommonOpts {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string output;
  std::string format = "json";
  bool strict = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts, const std::string& default_format) {
  opts.format = default_format;
  cmd->add_option("--seed", opts.seed, "RNG seed (env GPCS_SEED is the fallback, default 0)");
  cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
  cmd->add_option("--output,-o", opts.output, "output file ('-' = stdout)");
  cmd->add_option("--format", opts.format, "output format (csv or json)")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_flag("--strict", opts.strict, "fail (exit 6) instead of reporting unconverged fits");
}

enum class CiChoice { None, PluginP1, PluginP2, Bootstrap };

CiChoice parse_ci_choice(const std::string& s) {
  if (s == "none") return CiChoice::None;
  if (s == "plugin-p1") return CiChoice::PluginP1;
  if (s == "plugin-p2") return CiChoice::PluginP2;
  if (s == "bootstrap") return CiChoice::Bootstrap;
  throw Error(errc::invalid_argument, "unknown --ci choice '" + s + "'");
}

// ---- estimate ---------------------------------------------------------------

struct EstimateOpts {
  CommonOpts common;
  std::string input, x_col, y_col;
  std::string label_col;
  int k = 0;
  int k_max = 0;
  std::string ci = "plugin-p1";
  double level = 0.95;
  int bootstrap_b = 1000;
  int restarts = 30;
};

int cmd_estimate(const EstimateOpts& opts) {
  const std::uint64_t seed = resolve_seed(opts.common.seed);
  const auto ingest = ingest_csv(opts.input, opts.x_col, opts.y_col,
                                 opts.label_col.empty()
                                     ? std::nullopt
                                     : std::optional<std::string>(opts.label_col));
  const BivariateSample& sample = ingest.sample;
  const std::size_t n = sample.size();

  KlinesConfig cfg;
  cfg.restarts = opts.restarts;
  cfg.seed = derive_seed(seed, 1);
  cfg.threads = opts.common.threads;

  GcsEstimate est;
  if (sample.has_labels()) {
    est = r2_gs(sample);
  } else if (opts.k > 0) {
    est = r2_gu(sample.points(), opts.k, cfg);
  } else if (opts.k_max > 0) {
    est = r2_gu_auto(sample.points(), opts.k_max, cfg);
  } else {
    throw Error(errc::invalid_argument,
                "estimate: need --label (specified) or --k / --k-max (unspecified)");
  }
  if (opts.common.strict && est.fit && !est.fit->converged) {
    throw Error(errc::non_convergence, "estimate: K-lines did not converge (--strict)");
  }

  json report{{"schema_version", kSchemaVersion},
              {"version", kVersion},
              {"command", "estimate"},
              {"timestamp", iso_timestamp()},
              {"seed", seed},
              {"n", n},
              {"dropped_rows", ingest.dropped_rows},
              {"scenario", to_string(est.scenario)},
              {"k", est.k},
              {"value", est.value}};
  json comps = json::array();
  for (const auto& c : est.components) comps.push_back(component_to_json(c));
  report["components"] = comps;
  if (est.fit) {
    report["fit"] = json{{"objective", est.fit->objective},
                         {"iterations", est.fit->iterations},
                         {"restarts", est.fit->restarts_run},
                         {"converged", est.fit->converged}};
  }
  if (!ingest.label_mapping.empty()) {
    json mapping = json::object();
    for (const auto& [name, id] : ingest.label_mapping) mapping[name] = id;
    report["label_mapping"] = mapping;
  }

  switch (parse_ci_choice(opts.ci)) {
    case CiChoice::None:
      report["ci"] = nullptr;
      break;
    case CiChoice::PluginP1:
      report["ci"] = ci_to_json(plugin_ci(est, n, opts.level, VarianceVariant::GaussianClosedForm));
      break;
    case CiChoice::PluginP2:
      report["ci"] = ci_to_json(plugin_ci(est, n, opts.level, VarianceVariant::GeneralMoments));
      break;
    case CiChoice::Bootstrap: {
      BootstrapOptions bo;
      bo.replicates = opts.bootstrap_b;
      bo.mode = BootstrapMode::Nonparametric;
      bo.level = opts.level;
      bo.seed = derive_seed(seed, 2);
      bo.threads = opts.common.threads;
      bo.klines = cfg;
      const BootstrapCi bc = bootstrap_ci(sample, est, bo);
      report["ci"] = ci_to_json(bc.ci);
      report["ci"]["dropped_replicates"] = bc.dropped;
      break;
    }
  }

  write_text(opts.common.output, report.dump(2) + "\n");
  return 0;
}

// ---- scan -------------------------------------------------------------------

struct ScanOpts {
  CommonOpts common;
  std::string input;
  std::string measures = "gcs";
  std::string label_col;
  int k = 2;
  int k_max = 0;
  std::string ci = "none";
  double level = 0.95;
  int restarts = 30;
};

struct PairOutcome {
  std::size_t i = 0, j = 0;
  bool ok = false;
  std::string error;
  double r2 = 0.0, dc = 0.0, gcs = 0.0;
  int chosen_k = 0;
  std::optional<ConfidenceInterval> ci;
};

int cmd_scan(const ScanOpts& opts) {
  const std::uint64_t seed = resolve_seed(opts.common.seed);
  std::vector<std::string> exclude;
  if (!opts.label_col.empty()) exclude.push_back(opts.label_col);
  const NumericTable table = load_numeric_table(opts.input, exclude);
  const std::size_t m = table.columns.size();
  if (m < 2) throw Error(errc::invalid_argument, "scan: need at least 2 numeric columns");
  if (table.rows() < 2) throw Error(errc::insufficient_data, "scan: need at least 2 usable rows");

  std::vector<std::string> wanted;
  {
    std::stringstream ss(opts.measures);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item != "r2" && item != "dcor" && item != "gcs") {
        throw Error(errc::invalid_argument, "scan: unknown measure '" + item + "'");
      }
      wanted.push_back(item);
    }
    if (wanted.empty()) throw Error(errc::invalid_argument, "scan: no measures requested");
  }
  const bool want_r2 = std::find(wanted.begin(), wanted.end(), "r2") != wanted.end();
  const bool want_dcor = std::find(wanted.begin(), wanted.end(), "dcor") != wanted.end();
  const bool want_gcs = std::find(wanted.begin(), wanted.end(), "gcs") != wanted.end();

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }

  std::vector<PairOutcome> outcomes(pairs.size());
  parallel_for(pairs.size(), opts.common.threads, [&](std::size_t p) {
    PairOutcome& out = outcomes[p];
    out.i = pairs[p].first;
    out.j = pairs[p].second;
    try {
      const std::size_t rows = table.rows();
      std::vector<BivariatePoint> pts(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        pts[r] = BivariatePoint{table.data[out.i][r], table.data[out.j][r]};
      }
      if (want_r2) out.r2 = pearson_r2(pts);
      if (want_dcor) out.dc = dcor(pts);
      if (want_gcs) {
        KlinesConfig cfg;
        cfg.restarts = opts.restarts;
        cfg.seed = derive_seed(seed, p);
        cfg.threads = 1;
        GcsEstimate est =
            opts.k_max > 0 ? r2_gu_auto(pts, opts.k_max, cfg) : r2_gu(pts, opts.k, cfg);
        out.gcs = est.value;
        out.chosen_k = est.k;
        const CiChoice choice = parse_ci_choice(opts.ci);
        if (choice == CiChoice::PluginP1 || choice == CiChoice::PluginP2) {
          out.ci = plugin_ci(est, rows, opts.level,
                             choice == CiChoice::PluginP1 ? VarianceVariant::GaussianClosedForm
                                                          : VarianceVariant::GeneralMoments);
        }
      }
      out.ok = true;
    } catch (const Error& e) {
      out.error = e.what();
    }
  });

  std::vector<const PairOutcome*> good;
  for (const auto& o : outcomes) {
    if (o.ok) {
      good.push_back(&o);
    } else {
      std::cerr << "scan: pair (" << table.columns[o.i] << ", " << table.columns[o.j]
                << ") failed: " << o.error << "\n";
    }
  }
  // Rank by the clustering measure when present, else by the first one asked.
  auto key = [&](const PairOutcome* o) {
    if (want_gcs) return o->gcs;
    if (wanted.front() == "r2") return o->r2;
    return o->dc;
  };
  std::stable_sort(good.begin(), good.end(),
                   [&](const PairOutcome* a, const PairOutcome* b) { return key(a) > key(b); });

  std::ostringstream text;
  if (opts.common.format == "csv") {
    text << "x,y";
    for (const auto& w : wanted) text << "," << w;
    if (want_gcs) {
      text << ",k";
      if (parse_ci_choice(opts.ci) != CiChoice::None) text << ",ci_lower,ci_upper";
    }
    text << "\n";
    for (const PairOutcome* o : good) {
      text << csv_quote(table.columns[o->i]) << "," << csv_quote(table.columns[o->j]);
      for (const auto& w : wanted) {
        text << "," << fmt_double(w == "r2" ? o->r2 : (w == "dcor" ? o->dc : o->gcs));
      }
      if (want_gcs) {
        text << "," << o->chosen_k;
        if (o->ci) text << "," << fmt_double(o->ci->lower) << "," << fmt_double(o->ci->upper);
        else if (parse_ci_choice(opts.ci) != CiChoice::None) text << ",,";
      }
      text << "\n";
    }
  } else {
    json rows = json::array();
    for (const PairOutcome* o : good) {
      json row{{"x", table.columns[o->i]}, {"y", table.columns[o->j]}};
      if (want_r2) row["r2"] = o->r2;
      if (want_dcor) row["dcor"] = o->dc;
      if (want_gcs) {
        row["gcs"] = o->gcs;
        row["k"] = o->chosen_k;
        if (o->ci) row["ci"] = ci_to_json(*o->ci);
      }
      rows.push_back(row);
    }
    json report{{"schema_version", kSchemaVersion}, {"version", kVersion},
                {"command", "scan"},                {"timestamp", iso_timestamp()},
                {"seed", seed},                     {"dropped_rows", table.dropped_rows},
                {"n", table.rows()},                {"pairs", rows},
                {"failures", outcomes.size() - good.size()}};
    text << report.dump(2) << "\n";
  }
  write_text(opts.common.output, text.str());
  return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  int setting = 0;
  std::string spec_file;
  std::size_t n = 100;
  int reps = 1000;
  std::string scenario = "specified";
  std::string methods = "asymp,p1";
  double level = 0.95;
  int bootstrap_b = 200;
  int restarts = 30;
  bool aic_k = false;
  int k_max = 10;
};

int cmd_simulate(const SimulateOpts& opts) {
  if ((opts.setting == 0) == opts.spec_file.empty()) {
    throw Error(errc::invalid_argument, "simulate: give exactly one of --setting or --spec");
  }
  const MixtureSpec spec =
      opts.setting != 0 ? builtin_setting(opts.setting) : load_spec_file(opts.spec_file);

  CoverageOptions co;
  co.n = opts.n;
  co.reps = opts.reps;
  if (opts.scenario == "specified") co.scenario = Scenario::Specified;
  else if (opts.scenario == "unspecified") co.scenario = Scenario::Unspecified;
  else throw Error(errc::invalid_argument, "simulate: scenario must be specified|unspecified");

  co.methods.clear();
  std::stringstream ss(opts.methods);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "asymp") co.methods.push_back(CiMethodKind::Asymp);
    else if (item == "p1") co.methods.push_back(CiMethodKind::P1);
    else if (item == "p2") co.methods.push_back(CiMethodKind::P2);
    else if (item == "bootstrap") co.methods.push_back(CiMethodKind::Bootstrap);
    else throw Error(errc::invalid_argument, "simulate: unknown method '" + item + "'");
  }
  co.seed = resolve_seed(opts.common.seed);
  co.level = opts.level;
  co.threads = opts.common.threads;
  co.klines.restarts = opts.restarts;
  co.bootstrap_replicates = opts.bootstrap_b;
  co.use_aic_k = opts.aic_k;
  co.k_max = opts.k_max;

  const auto reports = coverage_experiment(spec, co, opts.setting);

  std::ostringstream text;
  if (opts.common.format == "csv") {
    text << "setting,n,scenario,method,coverage,target,reps,failures\n";
    for (const auto& r : reports) {
      text << r.setting_id << "," << r.n << "," << to_string(r.scenario) << ","
           << to_string(r.method) << "," << fmt_double(r.coverage) << "," << fmt_double(r.target)
           << "," << r.reps << "," << r.failures << "\n";
    }
  } else {
    json rows = json::array();
    for (const auto& r : reports) {
      rows.push_back(json{{"setting", r.setting_id},
                          {"n", r.n},
                          {"scenario", to_string(r.scenario)},
                          {"method", to_string(r.method)},
                          {"coverage", r.coverage},
                          {"target", r.target},
                          {"reps", r.reps},
                          {"failures", r.failures}});
    }
    json report{{"schema_version", kSchemaVersion}, {"version", kVersion},
                {"command", "simulate"},            {"timestamp", iso_timestamp()},
                {"seed", co.seed},                  {"spec", spec_to_json(spec)},
                {"reports", rows}};
    text << report.dump(2) << "\n";
  }
  write_text(opts.common.output, text.str());
  return 0;
}

// ---- power ------------------------------------------------------------------

struct PowerOpts {
  CommonOpts common;
  std::string pattern = "two_lines";
  std::vector<double> sigmas{1.0};
  std::vector<std::size_t> ns{50};
  int b = 1000;
  double alpha = 0.05;
  std::string measures = "r2,dcor,gcs";
  int k = 2;
  int restarts = 30;
  double x_sd = 5.0;
  double slope = 1.0;
  double curve_scale = 5.0;
};

int cmd_power(const PowerOpts& opts) {
  Pattern pattern;
  if (opts.pattern == "two_lines") pattern = Pattern::TwoLinesMixedSign;
  else if (opts.pattern == "linear") pattern = Pattern::Linear;
  else if (opts.pattern == "parabola") pattern = Pattern::Parabola;
  else if (opts.pattern == "mix") pattern = Pattern::PiecewiseNonlinearMix;
  else if (opts.pattern == "none") pattern = Pattern::PureNoise;
  else throw Error(errc::invalid_argument, "power: unknown pattern '" + opts.pattern + "'");

  std::vector<PowerMeasure> measures;
  {
    std::stringstream ss(opts.measures);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == "r2") measures.push_back(measure_pearson_r2());
      else if (item == "dcor") measures.push_back(measure_dcor());
      else if (item == "gcs") {
        KlinesConfig cfg;
        cfg.restarts = opts.restarts;
        measures.push_back(measure_r2_gu(opts.k, cfg));
      } else {
        throw Error(errc::invalid_argument, "power: unknown measure '" + item + "'");
      }
    }
  }

  const std::uint64_t seed = resolve_seed(opts.common.seed);
  std::vector<PowerReport> all;
  std::size_t block = 0;
  for (std::size_t n : opts.ns) {
    for (double sigma : opts.sigmas) {
      PatternSpec ps;
      ps.pattern = pattern;
      ps.sigma = sigma;
      ps.x_sd = opts.x_sd;
      ps.slope = opts.slope;
      ps.curve_scale = opts.curve_scale;
      PowerOptions po;
      po.n = n;
      po.replicates = opts.b;
      po.alpha = opts.alpha;
      po.seed = derive_seed(seed, block++);
      po.threads = opts.common.threads;
      auto reports = permutation_power(ps, measures, po);
      all.insert(all.end(), reports.begin(), reports.end());
    }
  }

  std::ostringstream text;
  if (opts.common.format == "csv") {
    text << "measure,n,sigma,alpha,b,threshold,power\n";
    for (const auto& r : all) {
      text << r.measure << "," << r.n << "," << fmt_double(r.sigma) << "," << fmt_double(r.alpha)
           << "," << r.b << "," << fmt_double(r.threshold) << "," << fmt_double(r.power) << "\n";
    }
  } else {
    json rows = json::array();
    for (const auto& r : all) {
      rows.push_back(json{{"measure", r.measure},
                          {"n", r.n},
                          {"sigma", r.sigma},
                          {"alpha", r.alpha},
                          {"b", r.b},
                          {"threshold", r.threshold},
                          {"power", r.power}});
    }
    json report{{"schema_version", kSchemaVersion}, {"version", kVersion},
                {"command", "power"},               {"timestamp", iso_timestamp()},
                {"seed", seed},                     {"pattern", opts.pattern},
                {"reports", rows}};
    text << report.dump(2) << "\n";
  }
  write_text(opts.common.output, text.str());
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"generalized Pearson correlation squares: estimation, inference, simulation"};
  app.require_subcommand(1);

  EstimateOpts est;
  CLI::App* cmd_est = app.add_subcommand(
      "estimate", "estimate the measure for one (x,y) pair, with a confidence interval");
  cmd_est->add_option("--input,-i", est.input, "input CSV file")->required();
  cmd_est->add_option("--x", est.x_col, "x column name")->required();
  cmd_est->add_option("--y", est.y_col, "y column name")->required();
  cmd_est->add_option("--label", est.label_col, "line-membership column (specified scenario)");
  cmd_est->add_option("--k", est.k, "number of lines (unspecified scenario)");
  cmd_est->add_option("--k-max", est.k_max, "choose K by AIC over 1..k_max");
  cmd_est->add_option("--ci", est.ci, "plugin-p1 | plugin-p2 | bootstrap | none");
  cmd_est->add_option("--level", est.level, "confidence level (default 0.95)");
  cmd_est->add_option("--b", est.bootstrap_b, "bootstrap replicates (default 1000)");
  cmd_est->add_option("--restarts", est.restarts, "K-lines restarts (default 30)");
  add_common(cmd_est, est.common, "json");

  ScanOpts scan;
  CLI::App* cmd_sc = app.add_subcommand("scan", "all-pairs association scan over a matrix");
  cmd_sc->add_option("--input,-i", scan.input, "input CSV file")->required();
  cmd_sc->add_option("--measures", scan.measures, "comma list of r2,dcor,gcs (default gcs)");
  cmd_sc->add_option("--label", scan.label_col, "column to exclude from the scan");
  cmd_sc->add_option("--k", scan.k, "number of lines for gcs (default 2)");
  cmd_sc->add_option("--k-max", scan.k_max, "choose K by AIC over 1..k_max");
  cmd_sc->add_option("--ci", scan.ci, "plugin-p1 | plugin-p2 | none (per-pair gcs CI)");
  cmd_sc->add_option("--level", scan.level, "confidence level");
  cmd_sc->add_option("--restarts", scan.restarts, "K-lines restarts");
  add_common(cmd_sc, scan.common, "csv");

  SimulateOpts sim;
  CLI::App* cmd_sim = app.add_subcommand("simulate", "coverage-probability experiment");
  cmd_sim->add_option("--setting", sim.setting, "built-in setting id (1..8)");
  cmd_sim->add_option("--spec", sim.spec_file, "mixture spec JSON file");
  cmd_sim->add_option("--n", sim.n, "sample size per replicate");
  cmd_sim->add_option("--reps", sim.reps, "replicates (>= 100)");
  cmd_sim->add_option("--scenario", sim.scenario, "specified | unspecified");
  cmd_sim->add_option("--methods", sim.methods, "comma list of asymp,p1,p2,bootstrap");
  cmd_sim->add_option("--level", sim.level, "confidence level");
  cmd_sim->add_option("--b", sim.bootstrap_b, "bootstrap replicates per CI");
  cmd_sim->add_option("--restarts", sim.restarts, "K-lines restarts");
  cmd_sim->add_flag("--aic-k", sim.aic_k, "choose K by AIC per replicate instead of the true K");
  cmd_sim->add_option("--k-max", sim.k_max, "AIC search bound when --aic-k is set");
  add_common(cmd_sim, sim.common, "csv");

  PowerOpts pow;
  CLI::App* cmd_pow = app.add_subcommand("power", "permutation-test power comparison");
  cmd_pow->add_option("--pattern", pow.pattern, "two_lines | linear | parabola | mix | none");
  cmd_pow->add_option("--sigma", pow.sigmas, "noise SDs (repeatable)")->delimiter(',');
  cmd_pow->add_option("--n", pow.ns, "sample sizes (repeatable)")->delimiter(',');
  cmd_pow->add_option("--b", pow.b, "samples per hypothesis (>= 200)");
  cmd_pow->add_option("--alpha", pow.alpha, "significance level (default 0.05)");
  cmd_pow->add_option("--measures", pow.measures, "comma list of r2,dcor,gcs");
  cmd_pow->add_option("--k", pow.k, "number of lines for gcs (default 2)");
  cmd_pow->add_option("--restarts", pow.restarts, "K-lines restarts");
  cmd_pow->add_option("--x-sd", pow.x_sd, "marginal SD of x (default 5)");
  cmd_pow->add_option("--slope", pow.slope, "line slope magnitude (default 1)");
  cmd_pow->add_option("--curve-scale", pow.curve_scale, "parabola scale (default 5)");
  add_common(cmd_pow, pow.common, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_est->parsed()) return cmd_estimate(est);
    if (cmd_sc->parsed()) return cmd_scan(scan);
    if (cmd_sim->parsed()) return cmd_simulate(sim);
    if (cmd_pow->parsed()) return cmd_power(pow);
    return 2;
  } catch (const Error& e) {
    std::cerr << "gpcs: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "gpcs: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gpcs
