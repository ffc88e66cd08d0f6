#include "aftsdar/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aftsdar/errors.hpp"

namespace aftsdar {

void ScenarioSpec::validate() const {
  if (n < 2) throw InputError("scenario needs n >= 2");
  if (p < 1 || K < 1 || K > p) throw InputError("scenario needs 1 <= K <= p");
  if (!(rho >= 0.0 && rho < 1.0)) throw InputError("rho must be in [0, 1)");
  if (sigma < 0.0) throw InputError("sigma must be non-negative");
  if (!(censor_rate >= 0.0 && censor_rate < 1.0))
    throw InputError("censor_rate must be in [0, 1)");
  if (coef_kind == CoefKind::RatioScaled && !(R > 1.0))
    throw InputError("RatioScaled needs R > 1");
}

Eigen::MatrixXd gen_design_neighbor(int n, int p, double rho,
                                    std::uint64_t seed) {
  if (p < 2) throw InputError("neighbor-correlated design needs p >= 2");
  Rng rng(seed);
  Eigen::MatrixXd base(n, p);
  for (int j = 0; j < p; ++j)
    for (int i = 0; i < n; ++i) base(i, j) = rng.normal();
  if (rho == 0.0) return base;

  Eigen::MatrixXd x = base;
  for (int j = 1; j < p - 1; ++j)
    x.col(j) += rho * (base.col(j + 1) + base.col(j - 1));
  return x;
}

Eigen::MatrixXd gen_design_ar1(int n, int p, double rho, std::uint64_t seed) {
  if (!(std::abs(rho) < 1.0)) throw InputError("AR(1) design needs |rho| < 1");
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  const double innovation = std::sqrt(1.0 - rho * rho);
  for (int i = 0; i < n; ++i) {
    double z = rng.normal();
    x(i, 0) = z;
    for (int j = 1; j < p; ++j) {
      z = rho * z + innovation * rng.normal();
      x(i, j) = z;
    }
  }
  return x;
}

std::pair<Eigen::VectorXd, std::vector<int>> gen_coefficients(
    const ScenarioSpec& spec) {
  spec.validate();
  Rng rng = Rng(spec.seed).split(1);

  // K indices uniform without replacement (partial Fisher-Yates).
  std::vector<int> pool(spec.p);
  for (int j = 0; j < spec.p; ++j) pool[j] = j;
  for (int k = 0; k < spec.K; ++k) {
    const int r = k + static_cast<int>(rng.below(
                          static_cast<std::uint64_t>(spec.p - k)));
    std::swap(pool[k], pool[r]);
  }
  std::vector<int> support(pool.begin(), pool.begin() + spec.K);
  std::sort(support.begin(), support.end());

  double m1, m2;
  if (spec.coef_kind == CoefKind::LogScaled) {
    m1 = spec.sigma * std::sqrt(2.0 * std::log(static_cast<double>(spec.p)) /
                                static_cast<double>(spec.n));
    m2 = 100.0 * m1;
  } else {
    m1 = 1.0;
    m2 = spec.R;
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(spec.p);
  for (int j : support) {
    double value = rng.uniform(m1, m2);
    if (spec.random_signs && rng.uniform() < 0.5) value = -value;
    beta[j] = value;
  }
  return {beta, support};
}

double calibrate_censoring(const Eigen::MatrixXd& X,
                           const Eigen::VectorXd& beta_star, double sigma,
                           double target_rate, std::uint64_t seed) {
  if (!(target_rate >= 0.0 && target_rate < 1.0))
    throw InputError("target censoring rate must be in [0, 1)");
  const int n = static_cast<int>(X.rows());

  // Surrogate raw failure times T = exp(x' beta + eps), rows resampled
  // from X; common random numbers u for C = u * eta_c keep the Monte
  // Carlo rate monotone in eta_c. Everything runs on the log scale: log
  // failure times span hundreds of nats when the signal is strong, so a
  // linear-scale bisection could not localize the crossing, and exp()
  // would overflow.
  constexpr int kDraws = 50000;
  Rng rng(seed);
  const Eigen::VectorXd xb = X * beta_star;  // hoisted out of the draw loop
  std::vector<double> log_time(kDraws), log_u(kDraws);
  for (int s = 0; s < kDraws; ++s) {
    const int row = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    log_time[s] = xb[row] + sigma * rng.normal();
    double u = rng.uniform();
    while (u == 0.0) u = rng.uniform();
    log_u[s] = std::log(u);
  }

  const auto rate_at = [&](double log_eta) {
    int censored = 0;
    for (int s = 0; s < kDraws; ++s)
      if (log_time[s] > log_u[s] + log_eta) ++censored;
    return static_cast<double>(censored) / kDraws;
  };

  // Bracket: rate is non-increasing in eta_c, -> 1 at 0 and -> 0 at
  // infinity.
  const double kLog4 = std::log(4.0);
  double log_lo = std::log(1e-12), log_hi = 0.0;
  int expand = 0;
  while (rate_at(log_hi) > target_rate) {
    log_hi += kLog4;
    if (++expand > 200)
      throw DegeneracyError("censoring target unreachable: rate stays above " +
                            std::to_string(target_rate));
  }
  while (rate_at(log_lo) < target_rate) {
    log_lo -= kLog4;
    if (++expand > 200)
      throw DegeneracyError("censoring target unreachable: rate stays below " +
                            std::to_string(target_rate));
  }

  for (int step = 0; step < 60; ++step) {
    const double mid = 0.5 * (log_lo + log_hi);
    const double rate = rate_at(mid);
    if (std::abs(rate - target_rate) <= 0.01) return std::exp(mid);
    if (rate > target_rate)
      log_lo = mid;
    else
      log_hi = mid;
  }
  throw DegeneracyError("censoring calibration did not converge to +-0.01 of " +
                        std::to_string(target_rate));
}

SimulatedInstance gen_instance(const ScenarioSpec& spec) {
  spec.validate();
  const Rng root(spec.seed);

  SimulatedInstance inst;
  Eigen::MatrixXd X =
      spec.design_kind == DesignKind::NeighborCorrelated
          ? gen_design_neighbor(spec.n, spec.p, spec.rho, root.split(0).seed())
          : gen_design_ar1(spec.n, spec.p, spec.rho, root.split(0).seed());

  auto [beta, support] = gen_coefficients(spec);
  inst.beta_star = beta;
  inst.true_support = support;

  Eigen::VectorXd log_t(spec.n);
  Rng noise = root.split(2);
  for (int i = 0; i < spec.n; ++i)
    log_t[i] = X.row(i).dot(beta) + spec.sigma * noise.normal();

  inst.dataset.X = std::move(X);
  inst.dataset.y.resize(spec.n);
  inst.dataset.delta.resize(spec.n);

  if (spec.censor_rate == 0.0) {
    inst.eta_c = std::numeric_limits<double>::infinity();
    inst.dataset.y = log_t;
    inst.dataset.delta.setOnes();
    inst.realized_censor_rate = 0.0;
    return inst;
  }

  inst.eta_c = calibrate_censoring(inst.dataset.X, beta, spec.sigma,
                                   spec.censor_rate, root.split(3).seed());
  Rng censor = root.split(4);
  int censored = 0;
  for (int i = 0; i < spec.n; ++i) {
    double u = censor.uniform();
    while (u == 0.0) u = censor.uniform();  // keep ln C finite
    const double c = u * inst.eta_c;  // raw time scale
    const double log_c = std::log(c);
    if (log_t[i] <= log_c) {
      inst.dataset.y[i] = log_t[i];
      inst.dataset.delta[i] = 1;
    } else {
      inst.dataset.y[i] = log_c;
      inst.dataset.delta[i] = 0;
      ++censored;
    }
  }
  inst.realized_censor_rate = static_cast<double>(censored) / spec.n;
  return inst;
}

}  // namespace aftsdar
