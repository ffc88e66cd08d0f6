#include "aftsdar/survival_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aftsdar/errors.hpp"

namespace aftsdar {

void SurvivalDataset::validate() const {
  const int n_rows = n();
  if (n_rows < 2) throw InputError("dataset needs at least 2 observations");
  if (delta.size() != n_rows || X.rows() != n_rows)
    throw InputError("y, delta and X row counts disagree");
  for (int i = 0; i < n_rows; ++i) {
    if (!std::isfinite(y[i]))
      throw InputError("non-finite log-time at row " + std::to_string(i));
    if (delta[i] != 0 && delta[i] != 1)
      throw InputError("status must be 0 or 1 at row " + std::to_string(i));
  }
  if (!X.allFinite()) throw InputError("covariate matrix has non-finite entries");
}

SortedSample sort_by_observed_time(const SurvivalDataset& dataset) {
  dataset.validate();
  const int n = dataset.n();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (dataset.y[a] != dataset.y[b]) return dataset.y[a] < dataset.y[b];
    return dataset.delta[a] > dataset.delta[b];  // events first at ties
  });

  SortedSample s;
  s.order = order;
  s.y_sorted.resize(n);
  s.delta_sorted.resize(n);
  s.X_sorted.resize(n, dataset.p());
  for (int i = 0; i < n; ++i) {
    s.y_sorted[i] = dataset.y[order[i]];
    s.delta_sorted[i] = dataset.delta[order[i]];
    s.X_sorted.row(i) = dataset.X.row(order[i]);
  }
  return s;
}

KMWeights kaplan_meier_weights(const SortedSample& sample) {
  const int n = sample.n();
  KMWeights out;
  out.w.resize(n);
  // Running product prod_{j<i} ((n-j)/(n-j+1))^delta_(j).
  double prod = 1.0;
  for (int i = 1; i <= n; ++i) {
    out.w[i - 1] = sample.delta_sorted[i - 1] == 1
                       ? prod / static_cast<double>(n - i + 1)
                       : 0.0;
    if (sample.delta_sorted[i - 1] == 1)
      prod *= static_cast<double>(n - i) / static_cast<double>(n - i + 1);
  }
  return out;
}

StandardizedDesign build_standardized_design(const SortedSample& sample,
                                             const KMWeights& weights) {
  const int n = sample.n();
  const int p = static_cast<int>(sample.X_sorted.cols());
  if (weights.w.size() != n)
    throw InputError("weights do not correspond to the sample");

  const Eigen::VectorXd sqrt_w = weights.w.cwiseSqrt();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double drop_tol = 1e-12 * sqrt_n;

  StandardizedDesign d;
  d.Ybar = sqrt_w.cwiseProduct(sample.y_sorted);

  std::vector<double> scales;
  for (int j = 0; j < p; ++j) {
    const double norm = sqrt_w.cwiseProduct(sample.X_sorted.col(j)).norm();
    if (norm < drop_tol) {
      d.dropped_columns.push_back(j);
    } else {
      d.retained.push_back(j);
      scales.push_back(sqrt_n / norm);
    }
  }
  if (d.retained.empty())
    throw DegeneracyError("all covariate columns have zero weighted norm");

  const int pr = static_cast<int>(d.retained.size());
  d.Xbar.resize(n, pr);
  d.d_scale.resize(pr);
  for (int k = 0; k < pr; ++k) {
    d.d_scale[k] = scales[k];
    d.Xbar.col(k) =
        sqrt_w.cwiseProduct(sample.X_sorted.col(d.retained[k])) * scales[k];
  }
  return d;
}

Eigen::VectorXd coefficients_to_original_scale(const Eigen::VectorXd& eta,
                                               const StandardizedDesign& design) {
  if (eta.size() != design.p())
    throw InputError("eta length does not match retained column count");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.p_original());
  for (int k = 0; k < design.p(); ++k)
    beta[design.retained[k]] = design.d_scale[k] * eta[k];
  return beta;
}

}  // namespace aftsdar
