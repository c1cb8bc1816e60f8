#include "covsmooth/design_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace covsmooth {

DesignGrid::DesignGrid(std::vector<double> points)
  : points_(std::move(points))
{
  if (points_.size() < 2)
    throw std::invalid_argument("design grid needs at least 2 points");
  for (std::size_t j = 0; j < points_.size(); ++j) {
    const double x = points_[j];
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
      throw std::invalid_argument("design point " + std::to_string(j + 1) +
                                  " outside [0,1]");
    if (j > 0 && !(points_[j - 1] < x))
      throw std::invalid_argument("design points must be strictly increasing "
                                  "(at index " +
                                  std::to_string(j + 1) + ")");
  }
}

std::pair<std::size_t, std::size_t>
DesignGrid::window(double center, double h) const
{
  // Closed window: |x_j - center| <= h, evaluated exactly as the weight code
  // evaluates it so that membership is consistent everywhere.
  auto first = std::partition_point(
    points_.begin(), points_.end(), [&](double x) {
      return x < center && std::abs(x - center) > h;
    });
  auto last = std::partition_point(first, points_.end(), [&](double x) {
    return !(x > center && std::abs(x - center) > h);
  });
  return { static_cast<std::size_t>(first - points_.begin()),
           static_cast<std::size_t>(last - points_.begin()) };
}

double DesignGrid::min_spacing() const noexcept
{
  double gap = points_[1] - points_[0];
  for (std::size_t j = 2; j < points_.size(); ++j)
    gap = std::min(gap, points_[j] - points_[j - 1]);
  return gap;
}

TriangleGrid::TriangleGrid(std::vector<EvalPoint> points, Source source)
  : points_(std::move(points))
  , source_(source)
{
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto [x, y] = points_[i];
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || y > 1.0 ||
        x > y)
      throw std::invalid_argument("evaluation point " + std::to_string(i) +
                                  " is not in the upper triangle");
  }
}

TabulatedDensity TabulatedDensity::sample(
  const std::function<double(double)>& f, std::size_t nodes)
{
  if (nodes < 1025)
    throw std::invalid_argument("density tabulation needs >= 1025 nodes");
  TabulatedDensity out;
  out.values.resize(nodes);
  const double step = 1.0 / static_cast<double>(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i)
    out.values[i] = f(static_cast<double>(i) * step);
  return out;
}

DesignGrid make_equidistant_grid(std::size_t p)
{
  if (p < 2)
    throw std::invalid_argument("equidistant grid needs p >= 2");
  std::vector<double> x(p);
  for (std::size_t j = 0; j < p; ++j)
    x[j] = (static_cast<double>(j) + 0.5) / static_cast<double>(p);
  return DesignGrid(std::move(x));
}

DesignGrid make_density_grid(std::size_t p, const TabulatedDensity& density)
{
  if (p < 2)
    throw std::invalid_argument("density grid needs p >= 2");
  const auto& f = density.values;
  const std::size_t nodes = f.size();
  if (nodes < 2)
    throw std::invalid_argument("density tabulation needs >= 2 nodes");
  for (std::size_t i = 0; i < nodes; ++i) {
    const bool endpoint = (i == 0 || i + 1 == nodes);
    if (!std::isfinite(f[i]) || f[i] < 0.0 || (!endpoint && f[i] <= 0.0))
      throw std::invalid_argument("density must be positive (node " +
                                  std::to_string(i) + ")");
  }

  const double step = 1.0 / static_cast<double>(nodes - 1);
  std::vector<double> cumulative(nodes, 0.0);
  for (std::size_t i = 1; i < nodes; ++i)
    cumulative[i] = cumulative[i - 1] + 0.5 * step * (f[i - 1] + f[i]);
  const double mass = cumulative.back();
  if (!(mass > 0.0))
    throw std::invalid_argument("density has zero mass");

  // Exact integral of the piecewise-linear interpolant, renormalized.
  auto cdf = [&](double x) {
    const double pos = std::clamp(x, 0.0, 1.0) / step;
    std::size_t i = std::min(static_cast<std::size_t>(pos), nodes - 2);
    const double d = x - static_cast<double>(i) * step;
    const double slope = (f[i + 1] - f[i]) / step;
    return (cumulative[i] + f[i] * d + 0.5 * slope * d * d) / mass;
  };

  std::vector<double> x(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double target =
      (static_cast<double>(j) + 0.5) / static_cast<double>(p);
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-13) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi)
        break;
      (cdf(mid) < target ? lo : hi) = mid;
    }
    x[j] = 0.5 * (lo + hi);
  }
  return DesignGrid(std::move(x));
}

DesignGrid make_density_grid(std::size_t p,
                             const std::function<double(double)>& density)
{
  return make_density_grid(p, TabulatedDensity::sample(density));
}

TriangleGrid triangle_eval_grid(const DesignGrid& grid)
{
  const std::size_t p = grid.size();
  std::vector<EvalPoint> pts;
  pts.reserve(p * (p + 1) / 2);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j; k < p; ++k)
      pts.push_back({ grid[j], grid[k] });
  return TriangleGrid(std::move(pts), TriangleGrid::Source::DesignPairs);
}

TriangleGrid strict_upper_eval_grid(const DesignGrid& grid)
{
  const std::size_t p = grid.size();
  std::vector<EvalPoint> pts;
  pts.reserve(p * (p - 1) / 2);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = j + 1; k < p; ++k)
      pts.push_back({ grid[j], grid[k] });
  return TriangleGrid(std::move(pts), TriangleGrid::Source::DesignPairs);
}

TriangleGrid lattice_eval_grid(std::size_t points_per_axis)
{
  if (points_per_axis < 2)
    throw std::invalid_argument("lattice needs >= 2 points per axis");
  const double last = static_cast<double>(points_per_axis - 1);
  std::vector<EvalPoint> pts;
  for (std::size_t a = 0; a < points_per_axis; ++a)
    for (std::size_t b = a; b < points_per_axis; ++b)
      pts.push_back({ static_cast<double>(a) / last,
                      static_cast<double>(b) / last });
  return TriangleGrid(std::move(pts), TriangleGrid::Source::Lattice);
}

} // namespace covsmooth
