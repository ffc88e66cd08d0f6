#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "aftsdar/sdar.hpp"
#include "aftsdar/survival_data.hpp"

namespace aftsdar {

enum class TuningCriterion { HBIC, CrossValidation, ResidualStop };

struct TuningConfig {
  int step = 1;          // grid increment (vartheta)
  int Q = 0;             // support-size ceiling; 0 means ceil(alpha*n/log n)
  double alpha = 1.0;    // used when Q == 0
  double tau = 1.0;
  int max_iter = 50;
  TuningCriterion criterion = TuningCriterion::HBIC;
  int folds = 5;             // CrossValidation only
  double epsilon = 0.0;      // ResidualStop only
  std::uint64_t seed = 0;    // CV fold assignment

  int resolve_Q(int n) const;
  void validate(int n) const;
};

struct TuningEntry {
  int T = 0;
  SdarFit fit;
  double score = 0.0;
  bool zero_rss = false;  // HBIC hit the residual floor
};

struct TuningPath {
  std::vector<TuningEntry> entries;
  int selected = -1;  // index into entries
  TuningCriterion criterion_used = TuningCriterion::HBIC;
  bool aborted = false;  // a solver error truncated the grid
  std::string abort_reason;

  const TuningEntry& best() const { return entries.at(selected); }
};

/// Sweep T = step, 2*step, ... <= Q, warm-starting each run from the
/// previous (eta, d). HBIC stops the sweep once a new entry fails to beat
/// the incumbent minimum by at least one penalty increment
/// (log(log n) log p) and selects the smallest T scoring within one
/// increment of the path minimum; the tolerance stops the raw argmin from
/// drifting toward Q through accumulated spurious-fit gains. ResidualStop
/// halts at the first fit with ||Ybar - Xbar eta|| < epsilon (and selects
/// the last entry if none qualifies). CrossValidation is handled by
/// cross_validate, which needs the raw dataset for fold-local reweighting.
TuningPath asdar_path(const StandardizedDesign& design,
                      const TuningConfig& config);

/// High-dimensional BIC: n log(RSS/n) + |A| log(log n) log p, with p the
/// retained column count. Zero residual is floored at 1e-300 inside the
/// log and flagged on the path entry.
double hbic_score(const SdarFit& fit, const StandardizedDesign& design,
                  bool* zero_rss = nullptr);

struct CrossValidationResult {
  int T_hat = 0;
  std::vector<int> grid;
  std::vector<double> mean_validation_loss;  // aligned with grid
};

/// K-fold CV over a grid of support sizes. Folds are stratified by
/// censoring status; sorting, Kaplan-Meier weights and standardization
/// are recomputed on each training fold, and the validation loss uses
/// KM weights computed on the validation fold alone:
///   sum_i w_(i) (Y_(i) - x_(i)^T beta)^2 / (2 n_val).
/// Throws DegeneracyError when a fold contains no events.
CrossValidationResult cross_validate(const SurvivalDataset& dataset,
                                     const std::vector<int>& grid, int folds,
                                     double tau, std::uint64_t seed,
                                     int max_iter = 50);

}  // namespace aftsdar
