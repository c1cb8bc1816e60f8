#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace covsmooth {

/// Strictly increasing design points x_1 < ... < x_p in [0, 1], p >= 2.
class DesignGrid
{
public:
  /// Validates the points; throws std::invalid_argument on violation.
  explicit DesignGrid(std::vector<double> points);

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t j) const noexcept { return points_[j]; }
  std::span<const double> points() const noexcept { return points_; }

  /// Index range [first, last) of the points inside the closed window
  /// [center - h, center + h].
  std::pair<std::size_t, std::size_t> window(double center, double h) const;

  /// Smallest gap between consecutive points.
  double min_spacing() const noexcept;

  friend bool operator==(const DesignGrid&, const DesignGrid&) = default;

private:
  std::vector<double> points_;
};

/// Evaluation point on the upper triangle, x <= y.
struct EvalPoint
{
  double x;
  double y;

  friend bool operator==(const EvalPoint&, const EvalPoint&) = default;
};

/// Ordered list of evaluation points in the upper triangle.
class TriangleGrid
{
public:
  enum class Source
  {
    DesignPairs,
    Lattice,
    Custom
  };

  /// Throws std::invalid_argument if a point leaves [0,1]^2 or has x > y.
  explicit TriangleGrid(std::vector<EvalPoint> points,
                        Source source = Source::Custom);

  std::size_t size() const noexcept { return points_.size(); }
  const EvalPoint& operator[](std::size_t i) const noexcept
  {
    return points_[i];
  }
  std::span<const EvalPoint> points() const noexcept { return points_; }
  Source source() const noexcept { return source_; }

  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

private:
  std::vector<EvalPoint> points_;
  Source source_;
};

/// Density tabulated on uniform nodes t_i = i / (size - 1) of [0, 1].
/// Values must be nonnegative, positive at every interior node.
struct TabulatedDensity
{
  std::vector<double> values;

  /// Samples `f` on `nodes` uniform nodes (at least 1025).
  static TabulatedDensity sample(const std::function<double(double)>& f,
                                 std::size_t nodes = 1025);
};

/// x_j = (j - 0.5) / p, j = 1..p.
DesignGrid make_equidistant_grid(std::size_t p);

/// Quantile grid of a design density: x_j solves F(x_j) = (j - 0.5) / p
/// where F is the trapezoid-integrated, renormalized CDF of the tabulation.
DesignGrid make_density_grid(std::size_t p, const TabulatedDensity& density);
DesignGrid make_density_grid(std::size_t p,
                             const std::function<double(double)>& density);

/// All design pairs (x_j, x_k), j <= k, row-major in j.
TriangleGrid triangle_eval_grid(const DesignGrid& grid);

/// Design pairs with j < k only (the off-diagonal design points).
TriangleGrid strict_upper_eval_grid(const DesignGrid& grid);

/// Regular lattice i / (points - 1) restricted to x <= y.
TriangleGrid lattice_eval_grid(std::size_t points_per_axis);

} // namespace covsmooth
