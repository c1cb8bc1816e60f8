#include "covsmooth/bandwidth_cv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace covsmooth {

std::vector<std::vector<std::size_t>> assign_folds(std::size_t n,
                                                   std::size_t folds,
                                                   std::uint64_t seed)
{
  if (folds < 2)
    throw std::invalid_argument("cross-validation needs at least 2 folds");
  if (folds > n)
    throw std::invalid_argument("more folds than curves");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{ 0 });
  // Fisher-Yates with a portable integer distribution.
  NormalSource source(RngSpec(seed).substream(0));
  for (std::size_t i = n; i > 1; --i) {
    const auto r = static_cast<std::size_t>(source.uniform_index(i - 1));
    std::swap(perm[i - 1], perm[r]);
  }

  std::vector<std::vector<std::size_t>> out(folds);
  for (std::size_t r = 0; r < folds; ++r) {
    const std::size_t begin = r * n / folds;
    const std::size_t end = (r + 1) * n / folds;
    out[r].assign(perm.begin() + static_cast<std::ptrdiff_t>(begin),
                  perm.begin() + static_cast<std::ptrdiff_t>(end));
    std::sort(out[r].begin(), out[r].end());
  }
  return out;
}

CVFoldData prepare_folds(const SampleMatrix& samples,
                         std::size_t folds,
                         std::uint64_t seed)
{
  const std::size_t n = samples.curves();
  if (folds > n)
    throw std::invalid_argument("more folds than curves");
  if (n < 2 * folds)
    throw std::invalid_argument(
      "cross-validation needs at least 2 curves per fold (n >= 2 K)");

  CVFoldData data;
  data.folds = assign_folds(n, folds, seed);
  for (std::size_t r = 0; r < folds; ++r) {
    std::vector<std::size_t> train;
    train.reserve(n);
    for (std::size_t s = 0; s < folds; ++s)
      if (s != r)
        train.insert(train.end(), data.folds[s].begin(), data.folds[s].end());
    std::sort(train.begin(), train.end());
    data.train_z.push_back(empirical_covariance(samples.select_rows(train)).z);
    data.test_z.push_back(
      empirical_covariance(samples.select_rows(data.folds[r])).z);
  }
  return data;
}

double cv_score(const WeightField& field,
                const CVFoldData& data,
                std::vector<double>* fold_scores)
{
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t folds = data.train_z.size();
  if (fold_scores)
    fold_scores->assign(folds, inf);
  if (field.has_holes())
    return inf;

  // Map each evaluation point back to its design pair.
  const auto& grid = field.grid();
  const auto& evals = field.evals();
  auto design_index = [&](double v) {
    const auto pts = grid.points();
    const auto it = std::lower_bound(pts.begin(), pts.end(), v);
    if (it == pts.end() || *it != v)
      throw std::invalid_argument(
        "cross-validation needs design-pair evaluation points");
    return static_cast<Eigen::Index>(it - pts.begin());
  };
  std::vector<std::pair<Eigen::Index, Eigen::Index>> index_of;
  index_of.reserve(evals.size());
  for (const auto& e : evals)
    index_of.emplace_back(design_index(e.x), design_index(e.y));

  double total = 0.0;
  for (std::size_t r = 0; r < folds; ++r) {
    const std::vector<double> fit = field.apply(data.train_z[r]);
    double worst = 0.0;
    for (std::size_t i = 0; i < fit.size(); ++i) {
      const auto [j, k] = index_of[i];
      worst = std::max(worst, std::abs(fit[i] - data.test_z[r](j, k)));
    }
    if (fold_scores)
      (*fold_scores)[r] = worst;
    total += worst;
  }
  return total / static_cast<double>(folds);
}

CVReport kfold_cv(const SampleMatrix& samples,
                  const DesignGrid& grid,
                  const SmootherConfig& base_config,
                  const CVPlan& plan,
                  WeightCache* cache)
{
  if (plan.h_candidates.empty())
    throw std::invalid_argument("empty bandwidth grid");
  for (std::size_t l = 0; l < plan.h_candidates.size(); ++l) {
    const double h = plan.h_candidates[l];
    if (!(h > 0.0 && h <= 1.0))
      throw std::invalid_argument("bandwidth candidates must lie in (0, 1]");
    if (l > 0 && h < plan.h_candidates[l - 1])
      throw std::invalid_argument("bandwidth candidates must be ascending");
  }
  if (samples.points() != grid.size())
    throw std::invalid_argument("samples do not match the design grid");

  const CVFoldData data = prepare_folds(samples, plan.folds, plan.seed);
  const TriangleGrid evals = strict_upper_eval_grid(grid);

  CVReport report;
  report.h_candidates = plan.h_candidates;
  report.folds = data.folds;
  report.scores.resize(plan.h_candidates.size());
  report.fold_scores.resize(plan.h_candidates.size());

  for (std::size_t l = 0; l < plan.h_candidates.size(); ++l) {
    SmootherConfig cfg = base_config;
    cfg.bandwidth = plan.h_candidates[l];
    if (cache) {
      report.scores[l] =
        cv_score(*cache->get(grid, cfg, evals), data, &report.fold_scores[l]);
    } else {
      report.scores[l] = cv_score(
        compute_weight_field(grid, cfg, evals), data, &report.fold_scores[l]);
    }
  }

  report.chosen_index = 0;
  for (std::size_t l = 1; l < report.scores.size(); ++l)
    if (report.scores[l] < report.scores[report.chosen_index])
      report.chosen_index = l;
  report.chosen_h = plan.h_candidates[report.chosen_index];
  return report;
}

std::vector<double> bandwidth_range(double start, double stop, double step)
{
  if (!(step > 0.0) || !(start > 0.0) || !(stop >= start) ||
      stop > 1.0 + 1e-12)
    throw std::invalid_argument("invalid bandwidth range");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    // Rounding to 12 decimals keeps 0.1 + 2 * 0.1 from printing as
    // 0.30000000000000004.
    const double h =
      std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12;
    if (h > stop * (1.0 + 1e-9))
      break;
    out.push_back(std::min(h, 1.0));
  }
  return out;
}

} // namespace covsmooth
