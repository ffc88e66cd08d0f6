#include <doctest.h>

#include <Eigen/Core>
#include <Eigen/SVD>
#include <cmath>

#include "aftsdar/errors.hpp"
#include "aftsdar/metrics.hpp"
#include "aftsdar/rng.hpp"

using namespace aftsdar;

namespace {

StandardizedDesign design_from_matrix(const Eigen::MatrixXd& Xbar) {
  StandardizedDesign d;
  d.Xbar = Xbar;
  d.Ybar = Eigen::VectorXd::Zero(Xbar.rows());
  d.d_scale = Eigen::VectorXd::Ones(Xbar.cols());
  d.retained.resize(Xbar.cols());
  for (int j = 0; j < Xbar.cols(); ++j) d.retained[j] = j;
  return d;
}

}  // namespace

TEST_CASE("relative error basics") {
  Eigen::VectorXd star(3);
  star << 1, -2, 0.5;
  CHECK(relative_error(star, star) == 0.0);
  CHECK(relative_error(Eigen::VectorXd::Zero(3), star) == 1.0);
  CHECK(relative_error(1.1 * star, star) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(relative_error(star, Eigen::VectorXd::Zero(3)), InputError);
}

TEST_CASE("exact support recovery compares index sets") {
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(6);
  beta[1] = 0.5;
  beta[4] = -2.0;
  CHECK(exact_support_recovery(beta, {1, 4}));
  beta[2] = 1e-6;  // extra nonzero
  CHECK(!exact_support_recovery(beta, {1, 4}));
  beta[2] = 0.0;
  CHECK(!exact_support_recovery(beta, {1, 3}));  // swapped index, same size
  beta[2] = 1e-13;  // below the nonzero tolerance
  CHECK(exact_support_recovery(beta, {1, 4}));
}

TEST_CASE("diagnostics on an orthogonal design") {
  const int n = 8, p = 6, T = 2;
  Eigen::MatrixXd Xbar = Eigen::MatrixXd::Zero(n, p);
  for (int j = 0; j < p; ++j) Xbar(j, j) = std::sqrt(static_cast<double>(n));
  const StandardizedDesign d = design_from_matrix(Xbar);
  const TheoryDiagnostics diag = theory_diagnostics(d, T, 0.5, 2);
  CHECK(diag.sigma_min_2T == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(diag.U_bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(diag.L_bound == doctest::Approx(1.0 / std::sqrt(4.0)).epsilon(1e-12));
  CHECK(diag.identifiable);
  CHECK(diag.step_size_ok);  // 0.5 < 1/sqrt(2)
  CHECK(diag.L_bound <= diag.U_bound);
}

TEST_CASE("duplicated columns are flagged unidentifiable") {
  const int n = 10;
  Rng rng(3);
  Eigen::MatrixXd Xbar(n, 4);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 4; ++j) Xbar(i, j) = rng.normal();
  Xbar.col(3) = Xbar.col(0);
  const TheoryDiagnostics diag =
      theory_diagnostics(design_from_matrix(Xbar), 1, 1.0, 1);
  CHECK(diag.sigma_min_2T == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(!diag.identifiable);
}

TEST_CASE("enumerated minimum eigenvalue matches a singular-value oracle") {
  const int n = 20, p = 8, T = 2;
  Rng rng(41);
  Eigen::MatrixXd Xbar(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Xbar(i, j) = rng.normal();
  const StandardizedDesign d = design_from_matrix(Xbar);
  const TheoryDiagnostics diag = theory_diagnostics(d, T, 1.0, 2);

  // Oracle: smallest squared singular value of each n x 2T submatrix.
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> subset(2 * T);
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b)
      for (int c = b + 1; c < p; ++c)
        for (int e = c + 1; e < p; ++e) {
          Eigen::MatrixXd sub(n, 4);
          sub << Xbar.col(a), Xbar.col(b), Xbar.col(c), Xbar.col(e);
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(sub);
          const double s = svd.singularValues().minCoeff();
          best = std::min(best, s * s);
        }
  CHECK(diag.sigma_min_2T == doctest::Approx(best).epsilon(1e-10));

  // U bound oracle: spectral norm of the full matrix.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xbar);
  const double smax = svd.singularValues().maxCoeff();
  CHECK(diag.U_bound == doctest::Approx(smax * smax / n).epsilon(1e-10));
}

TEST_CASE("diagnostics refuse infeasible enumerations") {
  Rng rng(43);
  Eigen::MatrixXd Xbar(30, 200);
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 200; ++j) Xbar(i, j) = rng.normal();
  CHECK_THROWS_AS(
      theory_diagnostics(design_from_matrix(Xbar), 5, 1.0, 5),
      DiagnosticsInfeasibleError);
}

TEST_CASE("r ratio is the max over min nonzero magnitude") {
  Eigen::MatrixXd Xbar = Eigen::MatrixXd::Identity(6, 4);
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(9);
  beta[2] = 3.0;
  beta[7] = -0.5;
  const TheoryDiagnostics diag =
      theory_diagnostics(design_from_matrix(Xbar), 1, 1.0, 2, beta);
  CHECK(diag.r_ratio == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("noiseless experiment recovers exactly") {
  ScenarioSpec scenario;
  scenario.n = 80;
  scenario.p = 150;
  scenario.K = 4;
  scenario.sigma = 0.0;
  scenario.censor_rate = 0.0;
  scenario.coef_kind = CoefKind::RatioScaled;
  scenario.R = 8.0;
  MethodSpec method;  // SDAR with T = K
  const ExperimentReport report = run_experiment(scenario, 5, method, 101);
  CHECK(report.failures == 0);
  CHECK(report.mean_relative_error <= 1e-8);
  CHECK(report.recovery_rate == 1.0);
}

TEST_CASE("experiment reports are deterministic and aggregate their rows") {
  ScenarioSpec scenario;
  scenario.n = 60;
  scenario.p = 100;
  scenario.K = 3;
  scenario.sigma = 0.5;
  scenario.censor_rate = 0.2;
  scenario.coef_kind = CoefKind::RatioScaled;
  scenario.R = 5.0;
  MethodSpec method;
  method.tau = 1.0;
  const ExperimentReport a = run_experiment(scenario, 8, method, 7);
  const ExperimentReport b = run_experiment(scenario, 8, method, 7);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].metrics.relative_error ==
          b.rows[i].metrics.relative_error);
    CHECK(a.rows[i].metrics.iterations == b.rows[i].metrics.iterations);
    CHECK(a.rows[i].seed == b.rows[i].seed);
  }
  double mean = 0.0;
  for (const auto& row : a.rows) mean += row.metrics.relative_error;
  mean /= static_cast<double>(a.rows.size());
  CHECK(a.mean_relative_error == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("iteration counts are invariant to covariate rescaling") {
  ScenarioSpec scenario;
  scenario.n = 70;
  scenario.p = 90;
  scenario.K = 4;
  scenario.sigma = 0.3;
  scenario.censor_rate = 0.0;
  scenario.coef_kind = CoefKind::RatioScaled;
  scenario.R = 5.0;
  scenario.seed = 55;
  const SimulatedInstance inst = gen_instance(scenario);

  auto fit_iterations = [](const SurvivalDataset& ds) {
    const SortedSample s = sort_by_observed_time(ds);
    const StandardizedDesign d =
        build_standardized_design(s, kaplan_meier_weights(s));
    SdarConfig config;
    config.T = 4;
    return sdar_fit(d, config).iterations;
  };

  SurvivalDataset scaled = inst.dataset;
  for (int j = 0; j < scaled.p(); ++j)
    scaled.X.col(j) *= (j % 2 == 0 ? 10.0 : 0.01);
  CHECK(fit_iterations(inst.dataset) == fit_iterations(scaled));
}
