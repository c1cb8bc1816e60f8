#pragma once

#include "covsmooth/design_grid.hpp"
#include "covsmooth/estimator.hpp"
#include "covsmooth/rng.hpp"
#include "covsmooth/weights.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace covsmooth {

struct CVPlan
{
  std::size_t folds = 5;
  /// Ascending (ties allowed).
  std::vector<double> h_candidates;
  std::uint64_t seed = 0;
};

/// Seeded permutation of 0..n-1 cut into `folds` contiguous chunks whose
/// sizes differ by at most one.
std::vector<std::vector<std::size_t>> assign_folds(std::size_t n,
                                                   std::size_t folds,
                                                   std::uint64_t seed);

struct CVReport
{
  std::vector<double> h_candidates;
  /// CV(h): mean over folds of the sup-norm score; +inf when any fold's
  /// estimate has a hole.
  std::vector<double> scores;
  /// fold_scores[h_index][fold].
  std::vector<std::vector<double>> fold_scores;
  std::size_t chosen_index = 0;
  double chosen_h = 0.0;
  std::vector<std::vector<std::size_t>> folds;
};

/// Per-fold train / test empirical covariances. The train covariance pools
/// the curves of all other folds.
struct CVFoldData
{
  std::vector<std::vector<std::size_t>> folds;
  std::vector<Eigen::MatrixXd> train_z;
  std::vector<Eigen::MatrixXd> test_z;
};

CVFoldData prepare_folds(const SampleMatrix& samples,
                         std::size_t folds,
                         std::uint64_t seed);

/// Mean over folds of max_{j<k} |fit - z_test|. `field` must be built on
/// strict_upper_eval_grid(grid). Returns +inf when the field has holes.
/// Per-fold scores are written to `fold_scores` when given.
double cv_score(const WeightField& field,
                const CVFoldData& data,
                std::vector<double>* fold_scores = nullptr);

/// K-fold cross-validation of the bandwidth. For fold r the estimator is fit
/// to the pooled empirical covariance of the other folds and scored by
///   max_{j<k} |Gamma_train(x_j, x_k) - z_test(j, k)|.
/// The bandwidth with the smallest mean score wins; ties go to the smaller h.
/// Requires n >= 2 K so that every fold has its own empirical covariance.
CVReport kfold_cv(const SampleMatrix& samples,
                  const DesignGrid& grid,
                  const SmootherConfig& base_config,
                  const CVPlan& plan,
                  WeightCache* cache = nullptr);

/// Bandwidths start, start + step, ... up to stop (inclusive, with a
/// 1e-9 relative slack against rounding). Each value is start + i * step
/// rounded to 12 decimals.
std::vector<double> bandwidth_range(double start, double stop, double step);

} // namespace covsmooth
