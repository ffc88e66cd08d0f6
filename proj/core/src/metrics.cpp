#include "aftsdar/metrics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "aftsdar/errors.hpp"

namespace aftsdar {

std::string MethodSpec::name() const {
  if (kind == Kind::Sdar) return "SDAR";
  switch (criterion) {
    case TuningCriterion::HBIC: return "ASDAR-HBIC";
    case TuningCriterion::CrossValidation: return "ASDAR-CV";
    case TuningCriterion::ResidualStop: return "ASDAR-residual";
  }
  return "ASDAR";
}

double relative_error(const Eigen::VectorXd& beta_hat,
                      const Eigen::VectorXd& beta_star) {
  const double denom = beta_star.norm();
  if (denom == 0.0) throw InputError("relative error undefined for beta* = 0");
  return (beta_hat - beta_star).norm() / denom;
}

bool exact_support_recovery(const Eigen::VectorXd& beta_hat,
                            const std::vector<int>& true_support) {
  std::vector<int> est;
  for (Eigen::Index j = 0; j < beta_hat.size(); ++j)
    if (std::abs(beta_hat[j]) > 1e-12) est.push_back(static_cast<int>(j));
  return est == true_support;
}

namespace {

// C(p, k) with saturation above the guard.
double binomial_guarded(int p, int k) {
  double c = 1.0;
  for (int i = 0; i < k; ++i) {
    c *= static_cast<double>(p - i) / static_cast<double>(i + 1);
    if (c > 2e6) return c;
  }
  return c;
}

}  // namespace

TheoryDiagnostics theory_diagnostics(const StandardizedDesign& design, int T,
                                     double tau, int K,
                                     const Eigen::VectorXd& beta_star) {
  const int p = design.p();
  const int n = design.n();
  const int m = 2 * T;
  if (m > p)
    throw DiagnosticsInfeasibleError("2T exceeds the retained column count");
  if (binomial_guarded(p, m) > 1e6)
    throw DiagnosticsInfeasibleError(
        "C(p, 2T) exceeds 1e6; use a smaller p or T for diagnostics");

  const Eigen::MatrixXd gram = design.Xbar.transpose() * design.Xbar;

  TheoryDiagnostics diag;
  diag.sigma_min_2T = std::numeric_limits<double>::infinity();

  // Enumerate all 2T-column subsets in lexicographic order.
  std::vector<int> subset(m);
  for (int i = 0; i < m; ++i) subset[i] = i;
  Eigen::MatrixXd sub(m, m);
  for (;;) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) sub(a, b) = gram(subset[a], subset[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub,
                                                      Eigen::EigenvaluesOnly);
    diag.sigma_min_2T = std::min(diag.sigma_min_2T, es.eigenvalues()[0]);

    int i = m - 1;
    while (i >= 0 && subset[i] == p - m + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < m; ++j) subset[j] = subset[j - 1] + 1;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(gram,
                                                      Eigen::EigenvaluesOnly);
  diag.U_bound = full.eigenvalues()[p - 1] / static_cast<double>(n);
  diag.L_bound =
      diag.sigma_min_2T / (static_cast<double>(n) * std::sqrt(2.0 * T));
  diag.xi = 1.0 - 2.0 * tau * diag.L_bound *
                      (1.0 - tau * std::sqrt(static_cast<double>(T)) *
                                 diag.U_bound) /
                      (std::sqrt(static_cast<double>(T)) * (1.0 + K));
  diag.step_size_ok =
      tau < 1.0 / (std::sqrt(static_cast<double>(T)) * diag.U_bound);
  diag.identifiable = diag.sigma_min_2T > 0.0;

  if (beta_star.size() > 0) {
    double max_abs = 0.0;
    double min_nonzero = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < beta_star.size(); ++j) {
      const double a = std::abs(beta_star[j]);
      max_abs = std::max(max_abs, a);
      if (a > 0.0) min_nonzero = std::min(min_nonzero, a);
    }
    if (std::isfinite(min_nonzero)) diag.r_ratio = max_abs / min_nonzero;
  }
  return diag;
}

namespace {

ReplicationRow run_one(const ScenarioSpec& scenario, const MethodSpec& method,
                       int rep, std::uint64_t rep_seed) {
  ReplicationRow row;
  row.replication = rep;
  row.seed = rep_seed;
  try {
    ScenarioSpec spec = scenario;
    spec.seed = rep_seed;
    const SimulatedInstance inst = gen_instance(spec);
    row.realized_censor_rate = inst.realized_censor_rate;

    const SortedSample sorted = sort_by_observed_time(inst.dataset);
    const KMWeights weights = kaplan_meier_weights(sorted);
    const StandardizedDesign design = build_standardized_design(sorted, weights);

    Eigen::VectorXd beta_hat;
    int iterations = 0;
    const auto start = std::chrono::steady_clock::now();
    if (method.kind == MethodSpec::Kind::Sdar) {
      SdarConfig sc;
      sc.T = method.T > 0 ? method.T : scenario.K;
      sc.tau = method.tau;
      const SdarFit fit = sdar_fit(design, sc);
      beta_hat = fit.beta_hat;
      iterations = fit.iterations;
    } else {
      TuningConfig tc;
      tc.tau = method.tau;
      tc.criterion = method.criterion;
      tc.epsilon = method.epsilon;
      tc.seed = rep_seed;
      const TuningPath path = asdar_path(design, tc);
      beta_hat = path.best().fit.beta_hat;
      for (const auto& e : path.entries) iterations += e.fit.iterations;
    }
    const auto stop = std::chrono::steady_clock::now();

    row.metrics.wall_time_seconds =
        std::chrono::duration<double>(stop - start).count();
    row.metrics.relative_error = relative_error(beta_hat, inst.beta_star);
    row.metrics.exact_support_recovery =
        exact_support_recovery(beta_hat, inst.true_support);
    row.metrics.iterations = iterations;
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

void mean_sd(const std::vector<double>& v, double& mean, double& sd) {
  mean = 0.0;
  sd = 0.0;
  if (v.empty()) return;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return;
  for (double x : v) sd += (x - mean) * (x - mean);
  sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentReport run_experiment(const ScenarioSpec& scenario, int replications,
                                const MethodSpec& method, std::uint64_t seed) {
  if (replications < 1) throw InputError("replications must be >= 1");
  ExperimentReport report;
  report.scenario = scenario;
  report.method = method;
  report.replications = replications;
  report.rows.resize(replications);

  const Rng root(seed);
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(),
                            static_cast<unsigned>(replications)));
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const int rep = next.fetch_add(1);
        if (rep >= replications) return;
        report.rows[rep] =
            run_one(scenario, method, rep, root.split(rep).seed());
      }
    });
  }
  for (auto& t : pool) t.join();

  std::vector<double> re, iters, secs;
  int recovered = 0, ok = 0;
  for (const auto& row : report.rows) {
    if (row.failed) {
      ++report.failures;
      continue;
    }
    ++ok;
    re.push_back(row.metrics.relative_error);
    iters.push_back(static_cast<double>(row.metrics.iterations));
    secs.push_back(row.metrics.wall_time_seconds);
    if (row.metrics.exact_support_recovery) ++recovered;
  }
  mean_sd(re, report.mean_relative_error, report.sd_relative_error);
  mean_sd(iters, report.mean_iterations, report.sd_iterations);
  mean_sd(secs, report.mean_wall_time, report.sd_wall_time);
  report.recovery_rate =
      ok > 0 ? static_cast<double>(recovered) / ok : 0.0;
  return report;
}

}  // namespace aftsdar
