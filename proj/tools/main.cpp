// Command-line front end: fit / tune / simulate / bench subcommands with
// machine-readable JSON reports. Reports are byte-deterministic given the
// seed; wall-clock timing therefore lives only in the bench CSV, never in
// report JSON.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "aftsdar/asdar.hpp"
#include "aftsdar/csv.hpp"
#include "aftsdar/errors.hpp"
#include "aftsdar/metrics.hpp"
#include "aftsdar/sdar.hpp"
#include "aftsdar/simgen.hpp"
#include "aftsdar/survival_data.hpp"

using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;
constexpr int kExitDiagnostics = 4;

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw aftsdar::InputError("cannot open config file '" + path + "'");
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw aftsdar::InputError("config file '" + path + "': " + e.what());
  }
  if (!cfg.is_object())
    throw aftsdar::InputError("config file must hold a JSON object");
  return cfg;
}

// Flags override the config file; unset flags fall back to it.
template <class T>
void cfg_override(const CLI::Option* opt, const json& cfg, const char* key,
                  T& value) {
  if (opt->count() == 0 && cfg.contains(key)) {
    try {
      value = cfg.at(key).get<T>();
    } catch (const json::exception&) {
      throw aftsdar::InputError(std::string("config key '") + key +
                                "' has the wrong type");
    }
  }
}

void emit(const json& report, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    std::ofstream out(output_path);
    if (!out)
      throw aftsdar::InputError("cannot write '" + output_path + "'");
    out << report.dump(2) << '\n';
  }
}

json fit_results_json(const aftsdar::SdarFit& fit,
                      const aftsdar::StandardizedDesign& design,
                      const std::vector<std::string>& names, bool eta_scale) {
  json coefficients = json::array();
  json active = json::array();
  for (int j : fit.active_set) {
    const int orig = design.retained[j];
    json c;
    c["index"] = orig;
    c["name"] = orig < static_cast<int>(names.size()) ? names[orig]
                                                      : "x" + std::to_string(orig + 1);
    c["beta"] = eta_scale ? fit.eta_hat[j] : fit.beta_hat[orig];
    coefficients.push_back(c);
    active.push_back(orig);
  }
  json r;
  r["coefficients"] = coefficients;
  r["active_set"] = active;
  r["iterations"] = fit.iterations;
  r["termination"] = aftsdar::to_string(fit.termination);
  r["kkt_gap"] = fit.kkt_gap;
  r["loss_trace"] = fit.loss_trace;
  r["scale"] = eta_scale ? "eta" : "beta";
  return r;
}

json design_diagnostics_json(const aftsdar::StandardizedDesign& design) {
  json d;
  d["n"] = design.n();
  d["p_retained"] = design.p();
  d["dropped_columns"] = design.dropped_columns;
  return d;
}

const char* criterion_name(aftsdar::TuningCriterion c) {
  switch (c) {
    case aftsdar::TuningCriterion::HBIC: return "hbic";
    case aftsdar::TuningCriterion::CrossValidation: return "cv";
    case aftsdar::TuningCriterion::ResidualStop: return "residual";
  }
  return "hbic";
}

aftsdar::TuningCriterion parse_criterion(const std::string& s) {
  if (s == "hbic") return aftsdar::TuningCriterion::HBIC;
  if (s == "cv") return aftsdar::TuningCriterion::CrossValidation;
  if (s == "residual") return aftsdar::TuningCriterion::ResidualStop;
  throw aftsdar::InputError("unknown criterion '" + s +
                            "' (expected hbic, cv or residual)");
}

json scenario_json(const aftsdar::ScenarioSpec& s) {
  json j;
  j["n"] = s.n;
  j["p"] = s.p;
  j["K"] = s.K;
  j["rho"] = s.rho;
  j["sigma"] = s.sigma;
  j["censor_rate"] = s.censor_rate;
  j["design"] =
      s.design_kind == aftsdar::DesignKind::NeighborCorrelated ? "neighbor" : "ar1";
  j["coef"] = s.coef_kind == aftsdar::CoefKind::LogScaled ? "log" : "ratio";
  j["R"] = s.R;
  j["random_signs"] = s.random_signs;
  j["seed"] = s.seed;
  return j;
}

struct ScenarioFlags {
  aftsdar::ScenarioSpec spec;
  std::string design = "neighbor";
  std::string coef = "log";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--n", spec.n, "sample size");
    cmd->add_option("--p", spec.p, "number of covariates");
    cmd->add_option("--K", spec.K, "true support size");
    cmd->add_option("--rho", spec.rho, "design correlation");
    cmd->add_option("--sigma", spec.sigma, "noise standard deviation");
    cmd->add_option("--censor-rate", spec.censor_rate,
                    "target censoring rate (0 disables censoring)");
    cmd->add_option("--design", design, "design family: neighbor|ar1");
    cmd->add_option("--coef", coef, "coefficient family: log|ratio");
    cmd->add_option("--R", spec.R, "magnitude ratio for --coef ratio");
    cmd->add_flag("--random-signs", spec.random_signs,
                  "randomize coefficient signs");
  }

  aftsdar::ScenarioSpec resolve() const {
    aftsdar::ScenarioSpec s = spec;
    if (design == "neighbor")
      s.design_kind = aftsdar::DesignKind::NeighborCorrelated;
    else if (design == "ar1")
      s.design_kind = aftsdar::DesignKind::AR1;
    else
      throw aftsdar::InputError("unknown design '" + design + "'");
    if (coef == "log")
      s.coef_kind = aftsdar::CoefKind::LogScaled;
    else if (coef == "ratio")
      s.coef_kind = aftsdar::CoefKind::RatioScaled;
    else
      throw aftsdar::InputError("unknown coefficient family '" + coef + "'");
    return s;
  }
};

int run_fit(const std::string& input, const std::string& output, int T,
            double tau, int max_iter, bool eta_scale) {
  const aftsdar::SurvivalDataset dataset = aftsdar::read_dataset_csv(input);
  const aftsdar::SortedSample sorted = aftsdar::sort_by_observed_time(dataset);
  const aftsdar::KMWeights weights = aftsdar::kaplan_meier_weights(sorted);
  const aftsdar::StandardizedDesign design =
      aftsdar::build_standardized_design(sorted, weights);

  aftsdar::SdarConfig sc;
  sc.T = T;
  sc.tau = tau;
  sc.max_iter = max_iter;
  const aftsdar::SdarFit fit = aftsdar::sdar_fit(design, sc);

  json report;
  report["config"] = {{"subcommand", "fit"}, {"input", input},     {"T", T},
                      {"tau", tau},          {"max_iter", max_iter},
                      {"scale", eta_scale ? "eta" : "beta"}};
  report["results"] =
      fit_results_json(fit, design, dataset.feature_names, eta_scale);
  report["diagnostics"] = design_diagnostics_json(design);
  json warnings = json::array();
  if (!design.dropped_columns.empty())
    warnings.push_back("dropped " +
                       std::to_string(design.dropped_columns.size()) +
                       " zero-weighted-norm columns");
  if (fit.termination != aftsdar::Termination::ActiveSetRepeat)
    warnings.push_back("solver did not reach a fixed point (" +
                       aftsdar::to_string(fit.termination) + ")");
  report["warnings"] = warnings;
  emit(report, output);
  return 0;
}

int run_tune(const std::string& input, const std::string& output,
             const std::string& criterion, int step, int Q, double alpha,
             int folds, double epsilon, double tau, int max_iter,
             std::uint64_t seed, bool eta_scale) {
  const aftsdar::SurvivalDataset dataset = aftsdar::read_dataset_csv(input);
  const aftsdar::SortedSample sorted = aftsdar::sort_by_observed_time(dataset);
  const aftsdar::KMWeights weights = aftsdar::kaplan_meier_weights(sorted);
  const aftsdar::StandardizedDesign design =
      aftsdar::build_standardized_design(sorted, weights);

  aftsdar::TuningConfig tc;
  tc.step = step;
  tc.Q = Q;
  tc.alpha = alpha;
  tc.tau = tau;
  tc.max_iter = max_iter;
  tc.folds = folds;
  tc.epsilon = epsilon;
  tc.seed = seed;
  tc.criterion = parse_criterion(criterion);

  json report;
  report["config"] = {{"subcommand", "tune"},
                      {"input", input},
                      {"criterion", criterion},
                      {"step", step},
                      {"Q", tc.resolve_Q(design.n())},
                      {"alpha", alpha},
                      {"folds", folds},
                      {"epsilon", epsilon},
                      {"tau", tau},
                      {"max_iter", max_iter},
                      {"seed", seed},
                      {"scale", eta_scale ? "eta" : "beta"}};
  json warnings = json::array();

  if (tc.criterion == aftsdar::TuningCriterion::CrossValidation) {
    const int q = std::min(tc.resolve_Q(design.n()),
                           std::min(design.n() - 1, design.p()));
    std::vector<int> grid;
    for (int t = step; t <= q; t += step) grid.push_back(t);
    const aftsdar::CrossValidationResult cv =
        aftsdar::cross_validate(dataset, grid, folds, tau, seed, max_iter);

    aftsdar::SdarConfig sc;
    sc.T = cv.T_hat;
    sc.tau = tau;
    sc.max_iter = max_iter;
    const aftsdar::SdarFit fit = aftsdar::sdar_fit(design, sc);

    json path = json::array();
    for (std::size_t g = 0; g < cv.grid.size(); ++g)
      path.push_back({{"T", cv.grid[g]},
                      {"mean_validation_loss", cv.mean_validation_loss[g]}});
    report["results"] =
        fit_results_json(fit, design, dataset.feature_names, eta_scale);
    report["results"]["path"] = path;
    report["results"]["selected_T"] = cv.T_hat;
  } else {
    const aftsdar::TuningPath path = aftsdar::asdar_path(design, tc);
    json entries = json::array();
    for (const auto& e : path.entries) {
      entries.push_back({{"T", e.T},
                         {"score", e.score},
                         {"iterations", e.fit.iterations},
                         {"termination", aftsdar::to_string(e.fit.termination)}});
      if (e.zero_rss) warnings.push_back("zero residual floored in HBIC at T=" +
                                         std::to_string(e.T));
    }
    if (path.aborted)
      warnings.push_back("tuning path aborted early: " + path.abort_reason);
    const auto& best = path.best();
    report["results"] =
        fit_results_json(best.fit, design, dataset.feature_names, eta_scale);
    report["results"]["path"] = entries;
    report["results"]["selected_T"] = best.T;
  }

  report["diagnostics"] = design_diagnostics_json(design);
  report["warnings"] = warnings;
  emit(report, output);
  return 0;
}

int run_simulate(const ScenarioFlags& flags, std::uint64_t seed,
                 const std::string& prefix) {
  aftsdar::ScenarioSpec spec = flags.resolve();
  spec.seed = seed;
  const aftsdar::SimulatedInstance inst = aftsdar::gen_instance(spec);

  aftsdar::write_dataset_csv(prefix + ".csv", inst.dataset);

  json beta = json::array();
  for (int j : inst.true_support)
    beta.push_back({{"index", j}, {"value", inst.beta_star[j]}});
  json sidecar;
  sidecar["config"] = scenario_json(spec);
  sidecar["beta_star"] = beta;
  sidecar["true_support"] = inst.true_support;
  sidecar["eta_c"] = std::isfinite(inst.eta_c) ? json(inst.eta_c) : json("inf");
  sidecar["realized_censor_rate"] = inst.realized_censor_rate;
  sidecar["seed"] = seed;

  std::ofstream out(prefix + ".json");
  if (!out) throw aftsdar::InputError("cannot write '" + prefix + ".json'");
  out << sidecar.dump(2) << '\n';
  return 0;
}

int run_bench(const ScenarioFlags& flags, const std::string& method_name,
              int T, double tau, const std::string& criterion, double epsilon,
              int replications, bool full_scale, std::uint64_t seed,
              const std::string& prefix) {
  aftsdar::ScenarioSpec scenario = flags.resolve();
  scenario.seed = seed;

  aftsdar::MethodSpec method;
  if (method_name == "sdar") {
    method.kind = aftsdar::MethodSpec::Kind::Sdar;
  } else if (method_name == "asdar") {
    method.kind = aftsdar::MethodSpec::Kind::Asdar;
    method.criterion = parse_criterion(criterion);
    method.epsilon = epsilon;
  } else {
    throw aftsdar::InputError("unknown method '" + method_name + "'");
  }
  method.T = T;
  method.tau = tau;

  const int reps = full_scale ? 100 : replications;
  const aftsdar::ExperimentReport report =
      aftsdar::run_experiment(scenario, reps, method, seed);

  json rows = json::array();
  for (const auto& row : report.rows) {
    rows.push_back({{"replication", row.replication},
                    {"seed", row.seed},
                    {"relative_error", row.metrics.relative_error},
                    {"recovered", row.metrics.exact_support_recovery},
                    {"iterations", row.metrics.iterations},
                    {"realized_censor_rate", row.realized_censor_rate},
                    {"failed", row.failed},
                    {"error", row.error}});
  }
  json out;
  out["config"] = {{"subcommand", "bench"},
                   {"scenario", scenario_json(scenario)},
                   {"method", method.name()},
                   {"T", T},
                   {"tau", tau},
                   {"criterion", criterion},
                   {"epsilon", epsilon},
                   {"replications", reps},
                   {"seed", seed}};
  out["results"] = {{"mean_relative_error", report.mean_relative_error},
                    {"sd_relative_error", report.sd_relative_error},
                    {"recovery_rate", report.recovery_rate},
                    {"mean_iterations", report.mean_iterations},
                    {"sd_iterations", report.sd_iterations},
                    {"rows", rows}};
  out["diagnostics"] = {{"failures", report.failures}};
  json warnings = json::array();
  if (report.failures > 0)
    warnings.push_back(std::to_string(report.failures) +
                       " replications failed");
  out["warnings"] = warnings;
  emit(out, prefix + ".json");

  // Wall-clock timing is run-dependent, so it lives only here.
  std::ofstream csv(prefix + ".csv");
  if (!csv) throw aftsdar::InputError("cannot write '" + prefix + ".csv'");
  csv.precision(17);
  csv << "n,p,K,rho,sigma,censor_rate,design,coef,R,method,replication,seed,"
         "relative_error,recovered,iterations,seconds\n";
  for (const auto& row : report.rows) {
    csv << scenario.n << ',' << scenario.p << ',' << scenario.K << ','
        << scenario.rho << ',' << scenario.sigma << ',' << scenario.censor_rate
        << ','
        << (scenario.design_kind == aftsdar::DesignKind::NeighborCorrelated
                ? "neighbor"
                : "ar1")
        << ','
        << (scenario.coef_kind == aftsdar::CoefKind::LogScaled ? "log" : "ratio")
        << ',' << scenario.R << ',' << method.name() << ',' << row.replication
        << ',' << row.seed << ',' << row.metrics.relative_error << ','
        << (row.metrics.exact_support_recovery ? 1 : 0) << ','
        << row.metrics.iterations << ',' << row.metrics.wall_time_seconds
        << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l0-penalized weighted least squares for the AFT model "
               "(support detection and root finding)"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file; flags take precedence");

  // fit
  auto* fit = app.add_subcommand("fit", "fit a dataset at a fixed support size");
  std::string fit_input, fit_output;
  int fit_T = 0, fit_max_iter = 50;
  double fit_tau = 1.0;
  bool fit_eta = false;
  auto* fit_input_opt =
      fit->add_option("-i,--input", fit_input, "dataset CSV")->required();
  fit->add_option("-o,--output", fit_output, "report JSON path (default stdout)");
  auto* fit_T_opt = fit->add_option("--T", fit_T, "support size");
  auto* fit_tau_opt = fit->add_option("--tau", fit_tau, "step size in (0,1]");
  auto* fit_mi_opt = fit->add_option("--max-iter", fit_max_iter, "iteration cap");
  fit->add_flag("--eta", fit_eta, "report coefficients on the normalized scale");

  // tune
  auto* tune = app.add_subcommand("tune", "adaptive support-size selection");
  std::string tune_input, tune_output, tune_criterion = "hbic";
  int tune_step = 1, tune_Q = 0, tune_folds = 5, tune_max_iter = 50;
  double tune_alpha = 1.0, tune_epsilon = 0.0, tune_tau = 1.0;
  std::uint64_t tune_seed = 0;
  bool tune_eta = false;
  tune->add_option("-i,--input", tune_input, "dataset CSV")->required();
  tune->add_option("-o,--output", tune_output, "report JSON path (default stdout)");
  auto* tune_crit_opt = tune->add_option("--criterion", tune_criterion,
                                         "hbic|cv|residual");
  auto* tune_step_opt = tune->add_option("--step", tune_step, "grid increment");
  auto* tune_Q_opt = tune->add_option("--Q", tune_Q, "grid ceiling (overrides alpha)");
  auto* tune_alpha_opt =
      tune->add_option("--alpha", tune_alpha, "Q = ceil(alpha n / log n)");
  auto* tune_folds_opt = tune->add_option("--folds", tune_folds, "CV folds");
  auto* tune_eps_opt =
      tune->add_option("--epsilon", tune_epsilon, "residual stopping level");
  auto* tune_tau_opt = tune->add_option("--tau", tune_tau, "step size");
  auto* tune_mi_opt = tune->add_option("--max-iter", tune_max_iter, "iteration cap");
  auto* tune_seed_opt = tune->add_option("--seed", tune_seed, "CV fold seed");
  tune->add_flag("--eta", tune_eta, "report coefficients on the normalized scale");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic instance");
  ScenarioFlags sim_flags;
  sim_flags.add_to(simulate);
  std::uint64_t sim_seed = 0;
  std::string sim_prefix;
  simulate->add_option("--seed", sim_seed, "generator seed");
  simulate->add_option("-o,--output", sim_prefix,
                       "output prefix (<prefix>.csv and <prefix>.json)")
      ->required();

  // bench
  auto* bench = app.add_subcommand("bench", "replicated simulation benchmark");
  ScenarioFlags bench_flags;
  bench_flags.add_to(bench);
  std::string bench_method = "sdar", bench_criterion = "hbic", bench_prefix;
  int bench_T = 0, bench_reps = 20;
  double bench_tau = 1.0, bench_epsilon = 0.0;
  std::uint64_t bench_seed = 0;
  bool bench_full = false;
  bench->add_option("--method", bench_method, "sdar|asdar");
  bench->add_option("--T", bench_T, "SDAR support size (default K)");
  bench->add_option("--tau", bench_tau, "step size");
  bench->add_option("--criterion", bench_criterion, "ASDAR criterion");
  bench->add_option("--epsilon", bench_epsilon, "ASDAR residual level");
  bench->add_option("--replications", bench_reps, "replication count");
  bench->add_flag("--full", bench_full, "paper-scale 100 replications");
  bench->add_option("--seed", bench_seed, "root seed");
  bench->add_option("-o,--output", bench_prefix,
                    "output prefix (<prefix>.json and <prefix>.csv)")
      ->required();

  try {
    app.parse(argc, argv);

    const json cfg = load_config_file(config_path);

    if (*fit) {
      cfg_override(fit_T_opt, cfg, "T", fit_T);
      cfg_override(fit_tau_opt, cfg, "tau", fit_tau);
      cfg_override(fit_mi_opt, cfg, "max_iter", fit_max_iter);
      (void)fit_input_opt;
      if (fit_T < 1)
        throw CLI::ValidationError("fit", "--T (or config key T) is required");
      return run_fit(fit_input, fit_output, fit_T, fit_tau, fit_max_iter,
                     fit_eta);
    }
    if (*tune) {
      cfg_override(tune_crit_opt, cfg, "criterion", tune_criterion);
      cfg_override(tune_step_opt, cfg, "step", tune_step);
      cfg_override(tune_Q_opt, cfg, "Q", tune_Q);
      cfg_override(tune_alpha_opt, cfg, "alpha", tune_alpha);
      cfg_override(tune_folds_opt, cfg, "folds", tune_folds);
      cfg_override(tune_eps_opt, cfg, "epsilon", tune_epsilon);
      cfg_override(tune_tau_opt, cfg, "tau", tune_tau);
      cfg_override(tune_mi_opt, cfg, "max_iter", tune_max_iter);
      cfg_override(tune_seed_opt, cfg, "seed", tune_seed);
      return run_tune(tune_input, tune_output, tune_criterion, tune_step,
                      tune_Q, tune_alpha, tune_folds, tune_epsilon, tune_tau,
                      tune_max_iter, tune_seed, tune_eta);
    }
    if (*simulate) return run_simulate(sim_flags, sim_seed, sim_prefix);
    if (*bench)
      return run_bench(bench_flags, bench_method, bench_T, bench_tau,
                       bench_criterion, bench_epsilon, bench_reps, bench_full,
                       bench_seed, bench_prefix);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const aftsdar::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const aftsdar::DiagnosticsInfeasibleError& e) {
    std::cerr << "diagnostics error: " << e.what() << '\n';
    return kExitDiagnostics;
  } catch (const aftsdar::DegeneracyError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDegenerate;
  }
}
