#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace aftsdar {

/// Right-censored sample: observed log-times, event indicators
/// (1 = failure observed, 0 = censored) and the covariate matrix.
struct SurvivalDataset {
  Eigen::VectorXd y;       // observed log-times, length n
  Eigen::VectorXi delta;   // 0/1 event indicators, length n
  Eigen::MatrixXd X;       // n x p covariates
  std::vector<std::string> feature_names;  // optional, size p or empty

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }

  /// Throws InputError if lengths disagree, n < 2, any delta is not 0/1,
  /// or any y/X entry is non-finite.
  void validate() const;
};

/// The dataset reindexed by observed time. Events precede censored rows
/// at tied times; the sort is otherwise stable.
struct SortedSample {
  std::vector<int> order;   // order[i] = original row index of sorted row i
  Eigen::VectorXd y_sorted;
  Eigen::VectorXi delta_sorted;
  Eigen::MatrixXd X_sorted;

  int n() const { return static_cast<int>(y_sorted.size()); }
};

/// Kaplan-Meier jump weights attached to the sorted sample.
struct KMWeights {
  Eigen::VectorXd w;  // length n, non-negative, zero at censored rows
};

/// Weighted, column-normalized design. Every retained column of Xbar has
/// Euclidean norm sqrt(n); d_scale is the diagonal of D with beta = D eta.
/// Columns whose weighted norm is ~0 are dropped and recorded; solver-side
/// vectors (eta) live in the retained coordinate space.
struct StandardizedDesign {
  Eigen::MatrixXd Xbar;             // n x p_retained, column-major
  Eigen::VectorXd Ybar;             // length n
  Eigen::VectorXd d_scale;          // length p_retained, all > 0
  std::vector<int> retained;        // original column index per retained column
  std::vector<int> dropped_columns; // original indices of dropped columns

  int n() const { return static_cast<int>(Xbar.rows()); }
  int p() const { return static_cast<int>(Xbar.cols()); }
  int p_original() const {
    return static_cast<int>(retained.size() + dropped_columns.size());
  }
};

/// Sort by observed time; at ties, event rows come before censored rows
/// and the original order is preserved otherwise.
SortedSample sort_by_observed_time(const SurvivalDataset& dataset);

/// Kaplan-Meier jumps:
///   w_(1) = delta_(1)/n,
///   w_(i) = delta_(i)/(n-i+1) * prod_{j<i} ((n-j)/(n-j+1))^delta_(j).
KMWeights kaplan_meier_weights(const SortedSample& sample);

/// Build Xbar = diag(sqrt(w)) X_sorted D and Ybar = diag(sqrt(w)) y_sorted,
/// with d_scale_j = sqrt(n)/||xtilde_j||. Columns with weighted norm below
/// 1e-12*sqrt(n) are dropped. Throws DegeneracyError if nothing survives.
StandardizedDesign build_standardized_design(const SortedSample& sample,
                                             const KMWeights& weights);

/// Map a retained-space eta back to the original covariate scale:
/// beta_j = d_scale_j * eta_j on retained columns, 0 on dropped ones.
Eigen::VectorXd coefficients_to_original_scale(const Eigen::VectorXd& eta,
                                               const StandardizedDesign& design);

}  // namespace aftsdar
