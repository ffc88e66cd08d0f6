#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "aftsdar/asdar.hpp"
#include "aftsdar/sdar.hpp"
#include "aftsdar/simgen.hpp"

namespace aftsdar {

struct FitMetrics {
  double relative_error = 0.0;
  bool exact_support_recovery = false;
  int iterations = 0;
  double wall_time_seconds = 0.0;
};

/// Brute-force quantities behind the step-size theory. sigma_min_2T is the
/// minimum eigenvalue over all 2T-column Gram submatrices, enumerated
/// exhaustively (guarded by C(p, 2T) <= 1e6).
struct TheoryDiagnostics {
  double sigma_min_2T = 0.0;
  double U_bound = 0.0;   // ||Xbar||_2^2 / n
  double L_bound = 0.0;   // sigma_min_2T / (n sqrt(2T))
  double xi = 0.0;        // 1 - 2 tau L (1 - tau sqrt(T) U) / (sqrt(T) (1+K))
  double r_ratio = 0.0;   // ||beta*||_inf / min |beta*_support|; 0 if unknown
  bool step_size_ok = false;    // tau < 1 / (sqrt(T) U)
  bool identifiable = false;    // sigma_min_2T > 0
};

struct MethodSpec {
  enum class Kind { Sdar, Asdar } kind = Kind::Sdar;
  int T = 0;  // Sdar only; 0 means T = K from the scenario
  double tau = 1.0;
  TuningCriterion criterion = TuningCriterion::HBIC;  // Asdar only
  double epsilon = 0.0;  // Asdar ResidualStop
  std::string name() const;
};

struct ReplicationRow {
  int replication = 0;
  std::uint64_t seed = 0;
  FitMetrics metrics;
  double realized_censor_rate = 0.0;
  bool failed = false;
  std::string error;
};

struct ExperimentReport {
  ScenarioSpec scenario;
  MethodSpec method;
  int replications = 0;
  int failures = 0;
  std::vector<ReplicationRow> rows;
  // Aggregates over successful rows.
  double mean_relative_error = 0.0, sd_relative_error = 0.0;
  double recovery_rate = 0.0;
  double mean_iterations = 0.0, sd_iterations = 0.0;
  double mean_wall_time = 0.0, sd_wall_time = 0.0;
};

/// ||beta_hat - beta_star|| / ||beta_star||. Throws InputError on
/// beta_star = 0.
double relative_error(const Eigen::VectorXd& beta_hat,
                      const Eigen::VectorXd& beta_star);

/// True iff {j : |beta_hat_j| > 1e-12} equals true_support.
bool exact_support_recovery(const Eigen::VectorXd& beta_hat,
                            const std::vector<int>& true_support);

/// Exhaustive computation of the step-size-condition quantities. Pass
/// beta_star to populate r_ratio; leave it empty otherwise. Throws
/// DiagnosticsInfeasibleError when C(p, 2T) > 1e6.
TheoryDiagnostics theory_diagnostics(
    const StandardizedDesign& design, int T, double tau, int K,
    const Eigen::VectorXd& beta_star = Eigen::VectorXd());

/// Seeded replication loop: generate, fit, score. Replications run in
/// parallel with per-replication derived seeds; per-replication failures
/// are recorded rather than fatal. Wall time wraps the fit call only.
ExperimentReport run_experiment(const ScenarioSpec& scenario, int replications,
                                const MethodSpec& method, std::uint64_t seed);

}  // namespace aftsdar
