#include "covsmooth/estimator.hpp"

#include "covsmooth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace covsmooth {

SampleMatrix::SampleMatrix(Eigen::MatrixXd values)
  : values_(std::move(values))
{
  if (values_.rows() < 2)
    throw std::invalid_argument("sample matrix needs at least 2 curves");
  if (values_.cols() < 2)
    throw std::invalid_argument("sample matrix needs at least 2 points");
  if (!values_.allFinite())
    throw std::invalid_argument("sample matrix has non-finite entries");
}

SampleMatrix SampleMatrix::select_rows(
  const std::vector<std::size_t>& rows) const
{
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), values_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) =
      values_.row(static_cast<Eigen::Index>(rows[r]));
  return SampleMatrix(std::move(out));
}

EmpiricalCovariance empirical_covariance(const SampleMatrix& samples)
{
  const auto& y = samples.values();
  const Eigen::Index n = y.rows();
  const Eigen::Index p = y.cols();
  if (n < 2)
    throw std::invalid_argument("empirical covariance needs n >= 2");

  EmpiricalCovariance out;
  out.means = y.colwise().mean().transpose();
  // sum_i (Y_ij Y_ik) - n Ybar_j Ybar_k, evaluated in centered form.
  const Eigen::MatrixXd centered = y.rowwise() - out.means.transpose();
  out.z.resize(p, p);
  const double denom = static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = j; k < p; ++k) {
      const double v = centered.col(j).dot(centered.col(k)) / denom;
      out.z(j, k) = v;
      out.z(k, j) = v;
    }
  }
  return out;
}

CovarianceSurface::CovarianceSurface(TriangleGrid evals,
                                     std::vector<double> values,
                                     std::vector<std::size_t> holes,
                                     std::optional<SmootherConfig> config)
  : evals_(std::move(evals))
  , values_(std::move(values))
  , holes_(std::move(holes))
  , hole_mask_(values_.size(), 0)
  , config_(config)
{
  if (values_.size() != evals_.size())
    throw std::invalid_argument("surface values do not match evaluations");
  std::sort(holes_.begin(), holes_.end());
  holes_.erase(std::unique(holes_.begin(), holes_.end()), holes_.end());
  for (std::size_t h : holes_) {
    if (h >= values_.size())
      throw std::invalid_argument("hole index out of range");
    hole_mask_[h] = 1;
    values_[h] = std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t i = 0; i < evals_.size(); ++i)
    index_.try_emplace({ evals_[i].x, evals_[i].y }, i);
}

CovarianceSurface CovarianceSurface::from_kernel(
  const TriangleGrid& evals,
  const std::function<double(double, double)>& kernel)
{
  std::vector<double> values(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i)
    values[i] = kernel(evals[i].x, evals[i].y);
  return CovarianceSurface(evals, std::move(values));
}

bool CovarianceSurface::is_hole(std::size_t i) const noexcept
{
  return hole_mask_[i] != 0;
}

std::optional<std::size_t> CovarianceSurface::find(double x, double y) const
{
  if (x > y)
    std::swap(x, y);
  if (auto it = index_.find({ x, y }); it != index_.end())
    return it->second;
  return std::nullopt;
}

CovarianceSurface smooth(const WeightField& field, const Eigen::MatrixXd& z)
{
  return CovarianceSurface(
    field.evals(), field.apply(z), field.holes(), field.config());
}

namespace {

void check_dimensions(const SampleMatrix& samples, const DesignGrid& grid)
{
  if (samples.points() != grid.size()) {
    std::ostringstream msg;
    msg << "samples have " << samples.points() << " columns but the grid has "
        << grid.size() << " points";
    throw std::invalid_argument(msg.str());
  }
}

} // namespace

CovarianceSurface estimate(const SampleMatrix& samples,
                           const DesignGrid& grid,
                           const SmootherConfig& config,
                           const TriangleGrid& evals)
{
  check_dimensions(samples, grid);
  const auto field = compute_weight_field(grid, config, evals);
  return smooth(field, empirical_covariance(samples).z);
}

CovarianceSurface estimate(const SampleMatrix& samples,
                           const DesignGrid& grid,
                           const SmootherConfig& config,
                           const TriangleGrid& evals,
                           WeightCache& cache)
{
  check_dimensions(samples, grid);
  const auto field = cache.get(grid, config, evals);
  return smooth(*field, empirical_covariance(samples).z);
}

double mirror_query(const CovarianceSurface& surface, double x, double y)
{
  if (auto idx = surface.find(x, y))
    return surface.value(*idx);
  std::ostringstream msg;
  msg << "(" << x << ", " << y << ") is not an evaluation point";
  throw NotFoundError(msg.str());
}

StdCurve std_curve(const CovarianceSurface& surface)
{
  StdCurve curve;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const auto& e = surface.evals()[i];
    if (e.x != e.y)
      continue;
    StdPoint pt{ e.x, 0.0, false, surface.is_hole(i) };
    if (pt.hole) {
      pt.sd = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double v = surface.value(i);
      if (v < 0.0) {
        pt.clamped = true;
        ++curve.clamp_count;
      }
      pt.sd = std::sqrt(std::max(v, 0.0));
    }
    curve.points.push_back(pt);
  }
  std::stable_sort(curve.points.begin(), curve.points.end(),
                   [](const StdPoint& a, const StdPoint& b) { return a.x < b.x; });
  return curve;
}

CovarianceSurface correlation_surface(const CovarianceSurface& surface,
                                      double sd_floor)
{
  std::map<double, double> sd;
  for (const auto& pt : std_curve(surface).points)
    if (!pt.hole)
      sd.emplace(pt.x, pt.sd);

  std::vector<double> values(surface.size());
  std::vector<std::size_t> holes;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const auto& e = surface.evals()[i];
    const auto sx = sd.find(e.x);
    const auto sy = sd.find(e.y);
    if (surface.is_hole(i) || sx == sd.end() || sy == sd.end() ||
        sx->second < sd_floor || sy->second < sd_floor) {
      holes.push_back(i);
      continue;
    }
    if (e.x == e.y) {
      values[i] = 1.0;
      continue;
    }
    values[i] =
      std::clamp(surface.value(i) / (sx->second * sy->second), -1.0, 1.0);
  }
  return CovarianceSurface(
    surface.evals(), std::move(values), std::move(holes), surface.config());
}

} // namespace covsmooth
