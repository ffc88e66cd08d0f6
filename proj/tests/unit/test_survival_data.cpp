#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "aftsdar/errors.hpp"
#include "aftsdar/rng.hpp"
#include "aftsdar/survival_data.hpp"

using namespace aftsdar;

namespace {

SurvivalDataset make_dataset(const std::vector<double>& y,
                             const std::vector<int>& delta, int p = 1) {
  const int n = static_cast<int>(y.size());
  SurvivalDataset ds;
  ds.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  ds.delta.resize(n);
  for (int i = 0; i < n; ++i) ds.delta[i] = delta[i];
  ds.X = Eigen::MatrixXd::Ones(n, p);
  return ds;
}

// Independent product-limit oracle: walk the survival curve S and take
// the drop at each position. Different algebraic route from the closed
// form used in kaplan_meier_weights.
Eigen::VectorXd km_jump_oracle(const Eigen::VectorXi& delta_sorted) {
  const int n = static_cast<int>(delta_sorted.size());
  Eigen::VectorXd w(n);
  double survival = 1.0;
  for (int i = 0; i < n; ++i) {
    if (delta_sorted[i] == 1) {
      const double next = survival * (1.0 - 1.0 / static_cast<double>(n - i));
      w[i] = survival - next;
      survival = next;
    } else {
      w[i] = 0.0;
    }
  }
  return w;
}

}  // namespace

TEST_CASE("sort orders by observed time") {
  const SurvivalDataset ds = make_dataset({3, 1, 2}, {1, 1, 1});
  const SortedSample s = sort_by_observed_time(ds);
  CHECK(s.order == std::vector<int>{1, 2, 0});
  CHECK(s.y_sorted[0] == 1.0);
  CHECK(s.y_sorted[2] == 3.0);
}

TEST_CASE("events precede censored rows at ties") {
  const SurvivalDataset ds = make_dataset({2, 2}, {0, 1});
  const SortedSample s = sort_by_observed_time(ds);
  CHECK(s.order == std::vector<int>{1, 0});
}

TEST_CASE("tie rule with mixed events and censorings") {
  // The only stable ordering with events first at equal y.
  const SurvivalDataset ds = make_dataset({5, 1, 5, 3}, {1, 0, 0, 1});
  const SortedSample s = sort_by_observed_time(ds);
  CHECK(s.order == std::vector<int>{1, 3, 0, 2});
}

TEST_CASE("sort rejects non-finite times") {
  SurvivalDataset ds = make_dataset({1, 2}, {1, 1});
  ds.y[0] = std::nan("");
  CHECK_THROWS_AS(sort_by_observed_time(ds), InputError);
}

TEST_CASE("applying the permutation reproduces the sorted fields") {
  Rng rng(11);
  SurvivalDataset ds = make_dataset({0, 0, 0, 0, 0, 0}, {1, 0, 1, 1, 0, 1}, 3);
  for (int i = 0; i < ds.n(); ++i) {
    ds.y[i] = rng.uniform(-2, 2);
    for (int j = 0; j < 3; ++j) ds.X(i, j) = rng.normal();
  }
  const SortedSample s = sort_by_observed_time(ds);
  for (int i = 0; i < ds.n(); ++i) {
    CHECK(s.y_sorted[i] == ds.y[s.order[i]]);
    CHECK(s.delta_sorted[i] == ds.delta[s.order[i]]);
    CHECK(s.X_sorted.row(i) == ds.X.row(s.order[i]));
    if (i > 0) CHECK(s.y_sorted[i] >= s.y_sorted[i - 1]);
  }
}

TEST_CASE("first Kaplan-Meier weight is delta/n") {
  const SurvivalDataset ds = make_dataset({1, 2, 3, 4, 5}, {1, 0, 0, 0, 0});
  const KMWeights w = kaplan_meier_weights(sort_by_observed_time(ds));
  CHECK(w.w[0] == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("no censoring gives uniform weights 1/n") {
  const SurvivalDataset ds = make_dataset({2, 1, 3}, {1, 1, 1});
  const KMWeights w = kaplan_meier_weights(sort_by_observed_time(ds));
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(w.w[i] - 1.0 / 3.0) < 1e-15);
}

TEST_CASE("weights match hand-computed jumps with censoring") {
  const SurvivalDataset ds = make_dataset({1, 2, 3, 4}, {1, 0, 1, 1});
  const KMWeights w = kaplan_meier_weights(sort_by_observed_time(ds));
  CHECK(w.w[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(w.w[1] == 0.0);
  CHECK(w.w[2] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(w.w[3] == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("weights match the product-limit oracle on random samples") {
  Rng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(19));
    SurvivalDataset ds;
    ds.y.resize(n);
    ds.delta.resize(n);
    ds.X = Eigen::MatrixXd::Ones(n, 1);
    for (int i = 0; i < n; ++i) {
      // Coarse grid so ties are common.
      ds.y[i] = std::floor(rng.uniform(0, 6));
      ds.delta[i] = rng.uniform() < 0.6 ? 1 : 0;
    }
    const SortedSample s = sort_by_observed_time(ds);
    const KMWeights w = kaplan_meier_weights(s);
    const Eigen::VectorXd oracle = km_jump_oracle(s.delta_sorted);
    REQUIRE((w.w - oracle).lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK(w.w.minCoeff() >= 0.0);
    CHECK(w.w.sum() <= 1.0 + 1e-12);
    // Total mass 1 exactly when the largest observation is an event.
    if (s.delta_sorted[n - 1] == 1)
      CHECK(w.w.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("standardization forces sqrt(n) column norms") {
  const SurvivalDataset ds = make_dataset({1, 2}, {1, 1});
  const SortedSample s = sort_by_observed_time(ds);
  const KMWeights w = kaplan_meier_weights(s);
  const StandardizedDesign d = build_standardized_design(s, w);
  // Column (1,1), w = (1/2,1/2): weighted norm 1, d_scale sqrt(2).
  CHECK(d.d_scale[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d.Xbar.col(0).norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("weighted column norm drops zero-weight rows") {
  // w = (0.25, 0, 0.375, 0.375) from delta (1,0,1,1); the weighted square
  // norm of column (1,9,2,2) is 0.25 + 0 + 1.5 + 1.5 = 3.25.
  SurvivalDataset ds = make_dataset({1, 2, 3, 4}, {1, 0, 1, 1});
  ds.X.resize(4, 1);
  ds.X << 1, 9, 2, 2;
  const SortedSample s = sort_by_observed_time(ds);
  const KMWeights w = kaplan_meier_weights(s);
  const StandardizedDesign d = build_standardized_design(s, w);
  const double xtilde_norm = 2.0 / d.d_scale[0];  // sqrt(n)/scale
  CHECK(xtilde_norm * xtilde_norm == doctest::Approx(3.25).epsilon(1e-12));
}

TEST_CASE("retained column norms are sqrt(n) on random data") {
  Rng rng(7);
  const int n = 40, p = 12;
  SurvivalDataset ds;
  ds.y.resize(n);
  ds.delta.resize(n);
  ds.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    ds.y[i] = rng.normal();
    ds.delta[i] = rng.uniform() < 0.7 ? 1 : 0;
    for (int j = 0; j < p; ++j) ds.X(i, j) = rng.normal();
  }
  ds.delta[0] = 1;
  const SortedSample s = sort_by_observed_time(ds);
  const StandardizedDesign d =
      build_standardized_design(s, kaplan_meier_weights(s));
  for (int j = 0; j < d.p(); ++j)
    CHECK(d.Xbar.col(j).norm() ==
          doctest::Approx(std::sqrt(static_cast<double>(n))).epsilon(1e-10));
}

TEST_CASE("Xbar is invariant to positive column rescaling") {
  Rng rng(13);
  const int n = 25, p = 6;
  SurvivalDataset ds;
  ds.y.resize(n);
  ds.delta.resize(n);
  ds.X.resize(n, p);
  for (int i = 0; i < n; ++i) {
    ds.y[i] = rng.normal();
    ds.delta[i] = rng.uniform() < 0.8 ? 1 : 0;
    for (int j = 0; j < p; ++j) ds.X(i, j) = rng.normal();
  }
  const SortedSample s1 = sort_by_observed_time(ds);
  const StandardizedDesign d1 =
      build_standardized_design(s1, kaplan_meier_weights(s1));

  SurvivalDataset scaled = ds;
  scaled.X.col(2) *= 37.5;
  scaled.X.col(4) *= 0.003;
  const SortedSample s2 = sort_by_observed_time(scaled);
  const StandardizedDesign d2 =
      build_standardized_design(s2, kaplan_meier_weights(s2));
  CHECK((d1.Xbar - d2.Xbar).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("all-censored-to-zero-weight design is degenerate") {
  // Only the last row is an event but its covariate row is zero, so every
  // weighted column norm vanishes.
  SurvivalDataset ds = make_dataset({1, 2, 3}, {0, 0, 1});
  ds.X << 1, 2, 0;
  const SortedSample s = sort_by_observed_time(ds);
  const KMWeights w = kaplan_meier_weights(s);
  CHECK_THROWS_AS(build_standardized_design(s, w), DegeneracyError);
}

TEST_CASE("coefficients map back through the diagonal rescaling") {
  StandardizedDesign d;
  d.Xbar = Eigen::MatrixXd::Identity(2, 2);
  d.Ybar = Eigen::VectorXd::Zero(2);
  d.d_scale.resize(2);
  d.d_scale << 2, 3;
  d.retained = {0, 1};

  Eigen::VectorXd eta(2);
  eta << 1, 0;
  const Eigen::VectorXd beta = coefficients_to_original_scale(eta, d);
  CHECK(beta[0] == 2.0);
  CHECK(beta[1] == 0.0);

  CHECK(coefficients_to_original_scale(Eigen::VectorXd::Zero(2), d).isZero());

  // Round trip eta -> beta -> eta.
  eta << 0.7, -1.3;
  const Eigen::VectorXd back =
      coefficients_to_original_scale(eta, d).cwiseQuotient(d.d_scale);
  CHECK((back - eta).lpNorm<Eigen::Infinity>() < 1e-14);

  Eigen::VectorXd wrong(3);
  CHECK_THROWS_AS(coefficients_to_original_scale(wrong, d), InputError);
}

TEST_CASE("dropped columns report zero coefficients") {
  SurvivalDataset ds = make_dataset({1, 2, 3}, {1, 1, 0}, 2);
  ds.X.col(1).setZero();
  const SortedSample s = sort_by_observed_time(ds);
  const StandardizedDesign d =
      build_standardized_design(s, kaplan_meier_weights(s));
  CHECK(d.dropped_columns == std::vector<int>{1});
  CHECK(d.retained == std::vector<int>{0});
  Eigen::VectorXd eta(1);
  eta << 1.0;
  const Eigen::VectorXd beta = coefficients_to_original_scale(eta, d);
  CHECK(beta.size() == 2);
  CHECK(beta[1] == 0.0);
}
