#include "aftsdar/asdar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aftsdar/errors.hpp"
#include "aftsdar/rng.hpp"

namespace aftsdar {

int TuningConfig::resolve_Q(int n) const {
  if (Q > 0) return Q;
  return static_cast<int>(std::ceil(alpha * n / std::log(static_cast<double>(n))));
}

void TuningConfig::validate(int n) const {
  if (step < 1) throw InputError("tuning step must be >= 1");
  if (resolve_Q(n) < step) throw InputError("Q must be at least the grid step");
  if (criterion == TuningCriterion::CrossValidation && folds < 2)
    throw InputError("cross-validation needs at least 2 folds");
  if (criterion == TuningCriterion::ResidualStop && !(epsilon > 0.0))
    throw InputError("ResidualStop needs a positive epsilon");
}

double hbic_score(const SdarFit& fit, const StandardizedDesign& design,
                  bool* zero_rss) {
  const double n = static_cast<double>(design.n());
  const double p = static_cast<double>(design.p());
  double mean_rss =
      (design.Ybar - design.Xbar * fit.eta_hat).squaredNorm() / n;
  // Residuals at roundoff level are zero for scoring purposes; otherwise a
  // noiseless fit would rank support sizes by floating-point dust.
  const double zero_tol = 1e-24 * std::max(1.0, design.Ybar.squaredNorm() / n);
  bool floored = false;
  if (mean_rss < zero_tol) {
    mean_rss = 1e-300;
    floored = true;
  }
  if (zero_rss) *zero_rss = floored;
  const double support = static_cast<double>(fit.active_set.size() -
      std::count_if(fit.active_set.begin(), fit.active_set.end(),
                    [&](int j) { return fit.eta_hat[j] == 0.0; }));
  return n * std::log(mean_rss) + support * std::log(std::log(n)) * std::log(p);
}

TuningPath asdar_path(const StandardizedDesign& design,
                      const TuningConfig& config) {
  config.validate(design.n());
  const int q = std::min(config.resolve_Q(design.n()),
                         std::min(design.n() - 1, design.p()));

  TuningPath path;
  path.criterion_used = config.criterion;

  // One HBIC penalty increment: the score cost of a single extra active
  // coordinate. Used both to stop the grid (a new entry must beat the
  // incumbent minimum by at least this much to justify growing T) and to
  // break near-ties toward the smallest support. Without the tolerance the
  // raw argmin drifts toward Q: the best spurious column among ~p inactive
  // candidates cuts n*log(RSS) by roughly 2 log p per step, slightly more
  // than the penalty log(log n) log p charges at moderate n.
  const double penalty_unit = std::log(std::log(static_cast<double>(design.n()))) *
                              std::log(static_cast<double>(design.p()));
  double best_score = std::numeric_limits<double>::infinity();

  std::optional<Eigen::VectorXd> eta0;
  std::optional<Eigen::VectorXd> d0;
  for (int t = config.step; t <= q; t += config.step) {
    SdarConfig sc;
    sc.T = t;
    sc.tau = config.tau;
    sc.max_iter = config.max_iter;
    TuningEntry entry;
    entry.T = t;
    try {
      entry.fit = sdar_fit(design, sc, eta0, d0);
    } catch (const std::exception& e) {
      path.aborted = true;
      path.abort_reason = e.what();
      break;
    }
    entry.score = hbic_score(entry.fit, design, &entry.zero_rss);
    eta0 = entry.fit.eta_hat;
    d0 = entry.fit.dual;
    path.entries.push_back(std::move(entry));

    if (config.criterion == TuningCriterion::ResidualStop) {
      const double residual =
          (design.Ybar - design.Xbar * path.entries.back().fit.eta_hat).norm();
      if (residual < config.epsilon) break;
    } else if (config.criterion == TuningCriterion::HBIC) {
      const double score = path.entries.back().score;
      const bool improved = score < best_score - penalty_unit;
      best_score = std::min(best_score, score);
      if (!improved && path.entries.size() > 1) break;
    }
  }
  if (path.entries.empty())
    throw DegeneracyError("tuning path produced no fits: " + path.abort_reason);

  if (config.criterion == TuningCriterion::ResidualStop) {
    path.selected = static_cast<int>(path.entries.size()) - 1;
  } else if (config.criterion == TuningCriterion::HBIC) {
    // Smallest T whose score is within one penalty increment of the path
    // minimum.
    double min_score = path.entries.front().score;
    for (const auto& e : path.entries) min_score = std::min(min_score, e.score);
    path.selected = 0;
    for (int i = 0; i < static_cast<int>(path.entries.size()); ++i)
      if (path.entries[i].score <= min_score + penalty_unit) {
        path.selected = i;
        break;
      }
  } else {
    path.selected = 0;
    for (int i = 1; i < static_cast<int>(path.entries.size()); ++i)
      if (path.entries[i].score < path.entries[path.selected].score)
        path.selected = i;
  }
  return path;
}

namespace {

SurvivalDataset subset_rows(const SurvivalDataset& dataset,
                            const std::vector<int>& rows) {
  SurvivalDataset out;
  const int m = static_cast<int>(rows.size());
  out.y.resize(m);
  out.delta.resize(m);
  out.X.resize(m, dataset.p());
  for (int i = 0; i < m; ++i) {
    out.y[i] = dataset.y[rows[i]];
    out.delta[i] = dataset.delta[rows[i]];
    out.X.row(i) = dataset.X.row(rows[i]);
  }
  out.feature_names = dataset.feature_names;
  return out;
}

}  // namespace

CrossValidationResult cross_validate(const SurvivalDataset& dataset,
                                     const std::vector<int>& grid, int folds,
                                     double tau, std::uint64_t seed,
                                     int max_iter) {
  dataset.validate();
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  if (grid.empty()) throw InputError("empty tuning grid");
  const int n = dataset.n();
  const int t_max = *std::max_element(grid.begin(), grid.end());
  if (n - n / folds < t_max + 1)
    throw InputError("training folds too small for the largest grid entry");

  // Stratified fold assignment: shuffle events and censored rows
  // separately, then deal round-robin.
  std::vector<int> events, censored;
  for (int i = 0; i < n; ++i)
    (dataset.delta[i] == 1 ? events : censored).push_back(i);
  Rng rng(seed);
  auto shuffle = [&](std::vector<int>& v, Rng r) {
    for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
      std::swap(v[i], v[r.below(static_cast<std::uint64_t>(i) + 1)]);
  };
  shuffle(events, rng.split(0));
  shuffle(censored, rng.split(1));

  std::vector<std::vector<int>> fold_rows(folds);
  for (int i = 0; i < static_cast<int>(events.size()); ++i)
    fold_rows[i % folds].push_back(events[i]);
  for (int i = 0; i < static_cast<int>(censored.size()); ++i)
    fold_rows[i % folds].push_back(censored[i]);

  CrossValidationResult result;
  result.grid = grid;
  result.mean_validation_loss.assign(grid.size(), 0.0);

  for (int f = 0; f < folds; ++f) {
    const auto& val_rows = fold_rows[f];
    bool has_event = false;
    for (int i : val_rows)
      if (dataset.delta[i] == 1) has_event = true;
    if (val_rows.empty() || !has_event)
      throw DegeneracyError("fold " + std::to_string(f) + " has no events");

    std::vector<int> train_rows;
    for (int g = 0; g < folds; ++g)
      if (g != f)
        train_rows.insert(train_rows.end(), fold_rows[g].begin(),
                          fold_rows[g].end());
    std::sort(train_rows.begin(), train_rows.end());

    const SurvivalDataset train = subset_rows(dataset, train_rows);
    const SortedSample train_sorted = sort_by_observed_time(train);
    const KMWeights train_w = kaplan_meier_weights(train_sorted);
    const StandardizedDesign train_design =
        build_standardized_design(train_sorted, train_w);

    const SurvivalDataset val = subset_rows(dataset, val_rows);
    const SortedSample val_sorted = sort_by_observed_time(val);
    const KMWeights val_w = kaplan_meier_weights(val_sorted);

    for (std::size_t g = 0; g < grid.size(); ++g) {
      SdarConfig sc;
      sc.T = grid[g];
      sc.tau = tau;
      sc.max_iter = max_iter;
      const SdarFit fit = sdar_fit(train_design, sc);

      double loss = 0.0;
      for (int i = 0; i < val_sorted.n(); ++i) {
        const double pred = val_sorted.X_sorted.row(i).dot(fit.beta_hat);
        const double r = val_sorted.y_sorted[i] - pred;
        loss += val_w.w[i] * r * r;
      }
      loss /= 2.0 * static_cast<double>(val_sorted.n());
      result.mean_validation_loss[g] += loss / folds;
    }
  }

  int best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    // Lowest T wins ties; the grid is scanned in order.
    if (result.mean_validation_loss[g] <
        result.mean_validation_loss[best])
      best = static_cast<int>(g);
  }
  result.T_hat = grid[best];
  return result;
}

}  // namespace aftsdar
