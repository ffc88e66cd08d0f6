#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aftsdar/survival_data.hpp"

namespace aftsdar {

struct SdarConfig {
  int T = 1;                 // target support size
  double tau = 1.0;          // step size in (0, 1]
  int max_iter = 50;
  double ls_rank_tol = 1e-10;  // relative rank tolerance for the Gram solve
  bool cycle_guard = true;

  /// Throws InputError unless 1 <= T <= min(n-1, p_retained) and 0 < tau <= 1.
  void validate(const StandardizedDesign& design) const;
};

enum class Termination { ActiveSetRepeat, MaxIter, CycleDetected };

std::string to_string(Termination t);

/// One solver run. eta_hat lives in the design's retained coordinate
/// space; beta_hat = D eta_hat mapped back to the original p columns
/// (zero at dropped columns). loss_trace[k] is the weighted least-squares
/// loss ||Ybar - Xbar eta^k||^2 / (2n), including the initial point, so
/// its length is iterations + 1.
struct SdarFit {
  Eigen::VectorXd eta_hat;
  Eigen::VectorXd beta_hat;
  Eigen::VectorXd dual;            // d at termination (retained space)
  std::vector<int> active_set;     // retained-space indices, ascending
  int iterations = 0;
  Termination termination = Termination::MaxIter;
  std::vector<double> loss_trace;
  double kkt_gap = 0.0;
};

/// Hard-thresholding operator: zero entries with |v_i| < sqrt(2 lambda),
/// keep the rest (>= keeps).
struct HardThresholdRule {
  double lambda = 0.0;
};

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& v,
                               const HardThresholdRule& rule);

/// Indices of the T largest |eta_i + tau d_i|, lowest index wins ties.
/// Both sets are returned sorted ascending.
std::pair<std::vector<int>, std::vector<int>> select_active_set(
    const Eigen::VectorXd& eta, const Eigen::VectorXd& d, double tau, int T);

/// Least-squares solve min ||Ybar - Xbar_A u|| over the active columns,
/// via a rank-revealing factorization of the |A| x |A| Gram matrix;
/// returns the minimum-norm solution when the Gram is rank deficient at
/// ls_rank_tol. Throws DegeneracyError when |A| > n.
Eigen::VectorXd solve_active_least_squares(const StandardizedDesign& design,
                                           const std::vector<int>& active,
                                           double ls_rank_tol = 1e-10);

/// d = Xbar^T (Ybar - Xbar eta) / n with d set to exactly zero on the
/// active indices.
Eigen::VectorXd update_dual(const StandardizedDesign& design,
                            const Eigen::VectorXd& eta,
                            const std::vector<int>& active);

/// Support-detection-and-root-finding iteration: alternate top-T support
/// detection on |eta + tau d| with an exact least-squares solve on the
/// detected support, until the active set repeats. eta0/d0 default to the
/// zero start (d0 is recomputed from eta0 when absent).
SdarFit sdar_fit(const StandardizedDesign& design, const SdarConfig& config,
                 const std::optional<Eigen::VectorXd>& eta0 = std::nullopt,
                 const std::optional<Eigen::VectorXd>& d0 = std::nullopt);

/// Fixed-point residual of the iteration at eta: the dual restricted to
/// supp(eta) plus any top-T violation of the support selection. Zero iff
/// eta is a fixed point (a local minimizer of the l0-penalized criterion).
double kkt_residual(const StandardizedDesign& design, const Eigen::VectorXd& eta,
                    double tau, int T);

/// Weighted least-squares loss ||Ybar - Xbar eta||^2 / (2n).
double wls_loss(const StandardizedDesign& design, const Eigen::VectorXd& eta);

}  // namespace aftsdar
