#include "aftsdar/sdar.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "aftsdar/errors.hpp"

namespace aftsdar {

void SdarConfig::validate(const StandardizedDesign& design) const {
  const int t_max = std::min(design.n() - 1, design.p());
  if (T < 1 || T > t_max)
    throw InputError("T must be in [1, min(n-1, p_retained)] = [1, " +
                     std::to_string(t_max) + "], got " + std::to_string(T));
  if (!(tau > 0.0 && tau <= 1.0))
    throw InputError("tau must be in (0, 1]");
  if (max_iter < 1) throw InputError("max_iter must be positive");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ActiveSetRepeat: return "ActiveSetRepeat";
    case Termination::MaxIter: return "MaxIter";
    case Termination::CycleDetected: return "CycleDetected";
  }
  return "Unknown";
}

Eigen::VectorXd hard_threshold(const Eigen::VectorXd& v,
                               const HardThresholdRule& rule) {
  const double threshold = std::sqrt(2.0 * rule.lambda);
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::abs(out[i]) < threshold) out[i] = 0.0;
  return out;
}

std::pair<std::vector<int>, std::vector<int>> select_active_set(
    const Eigen::VectorXd& eta, const Eigen::VectorXd& d, double tau, int T) {
  const int p = static_cast<int>(eta.size());
  if (d.size() != p) throw InputError("eta and d length mismatch");
  if (T > p) throw InputError("T exceeds the number of columns");

  const Eigen::VectorXd mag = (eta + tau * d).cwiseAbs();
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::nth_element(idx.begin(), idx.begin() + (T - 1), idx.end(),
                   [&](int a, int b) {
                     if (mag[a] != mag[b]) return mag[a] > mag[b];
                     return a < b;  // lowest index wins at ties
                   });
  std::vector<int> active(idx.begin(), idx.begin() + T);
  std::vector<int> inactive(idx.begin() + T, idx.end());
  std::sort(active.begin(), active.end());
  std::sort(inactive.begin(), inactive.end());
  return {std::move(active), std::move(inactive)};
}

Eigen::VectorXd solve_active_least_squares(const StandardizedDesign& design,
                                           const std::vector<int>& active,
                                           double ls_rank_tol) {
  const int t = static_cast<int>(active.size());
  if (t > design.n())
    throw DegeneracyError("active set larger than the sample size");

  Eigen::MatrixXd Xa(design.n(), t);
  for (int k = 0; k < t; ++k) Xa.col(k) = design.Xbar.col(active[k]);

  const Eigen::MatrixXd gram = Xa.transpose() * Xa;
  const Eigen::VectorXd rhs = Xa.transpose() * design.Ybar;

  // Rank-revealing solve of the normal equations; on rank deficiency this
  // yields the minimum-norm least-squares solution.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram.rows(),
                                                              gram.cols());
  cod.setThreshold(ls_rank_tol);
  cod.compute(gram);
  return cod.solve(rhs);
}

Eigen::VectorXd update_dual(const StandardizedDesign& design,
                            const Eigen::VectorXd& eta,
                            const std::vector<int>& active) {
  const Eigen::VectorXd residual = design.Ybar - design.Xbar * eta;
  Eigen::VectorXd d =
      design.Xbar.transpose() * residual / static_cast<double>(design.n());
  for (int j : active) d[j] = 0.0;
  return d;
}

double wls_loss(const StandardizedDesign& design, const Eigen::VectorXd& eta) {
  return (design.Ybar - design.Xbar * eta).squaredNorm() /
         (2.0 * static_cast<double>(design.n()));
}

SdarFit sdar_fit(const StandardizedDesign& design, const SdarConfig& config,
                 const std::optional<Eigen::VectorXd>& eta0,
                 const std::optional<Eigen::VectorXd>& d0) {
  config.validate(design);
  const int p = design.p();

  Eigen::VectorXd eta = eta0.value_or(Eigen::VectorXd::Zero(p));
  if (eta.size() != p) throw InputError("eta0 length mismatch");
  Eigen::VectorXd d;
  if (d0) {
    d = *d0;
    if (d.size() != p) throw InputError("d0 length mismatch");
  } else {
    d = update_dual(design, eta, {});
  }

  SdarFit fit;
  fit.loss_trace.push_back(wls_loss(design, eta));

  std::vector<int> active = select_active_set(eta, d, config.tau, config.T).first;
  std::set<std::vector<int>> seen;
  fit.termination = Termination::MaxIter;

  for (int k = 0; k < config.max_iter; ++k) {
    const Eigen::VectorXd u =
        solve_active_least_squares(design, active, config.ls_rank_tol);
    eta.setZero();
    for (int j = 0; j < static_cast<int>(active.size()); ++j)
      eta[active[j]] = u[j];
    d = update_dual(design, eta, active);
    ++fit.iterations;
    fit.loss_trace.push_back(wls_loss(design, eta));

    std::vector<int> next_active =
        select_active_set(eta, d, config.tau, config.T).first;
    if (next_active == active) {
      fit.termination = Termination::ActiveSetRepeat;
      break;
    }
    if (config.cycle_guard) {
      if (seen.count(next_active)) {
        fit.termination = Termination::CycleDetected;
        active = next_active;
        break;
      }
      seen.insert(active);
    }
    active = next_active;
  }

  fit.eta_hat = eta;
  fit.dual = d;
  fit.active_set = active;
  fit.beta_hat = coefficients_to_original_scale(eta, design);
  fit.kkt_gap = kkt_residual(design, eta, config.tau, config.T);
  return fit;
}

double kkt_residual(const StandardizedDesign& design, const Eigen::VectorXd& eta,
                    double tau, int T) {
  const Eigen::VectorXd d =
      design.Xbar.transpose() * (design.Ybar - design.Xbar * eta) /
      static_cast<double>(design.n());

  double stationarity = 0.0;
  std::vector<bool> in_support(eta.size(), false);
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    if (eta[i] != 0.0) {
      in_support[i] = true;
      stationarity = std::max(stationarity, std::abs(d[i]));
    }
  }

  const auto [active, inactive] = select_active_set(eta, d, tau, T);
  const Eigen::VectorXd mag = (eta + tau * d).cwiseAbs();
  double min_active = std::numeric_limits<double>::infinity();
  for (int j : active) min_active = std::min(min_active, mag[j]);
  double max_off_support = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    if (!in_support[i]) max_off_support = std::max(max_off_support, mag[i]);

  const double selection = std::max(0.0, max_off_support - min_active);
  return std::max(stationarity, selection);
}

}  // namespace aftsdar
