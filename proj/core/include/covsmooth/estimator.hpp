#pragma once

#include "covsmooth/design_grid.hpp"
#include "covsmooth/weights.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace covsmooth {

/// n x p observations Y_{i,j}; row i is curve i. Requires n >= 2, p >= 2 and
/// finite entries.
class SampleMatrix
{
public:
  explicit SampleMatrix(Eigen::MatrixXd values);

  std::size_t curves() const noexcept
  {
    return static_cast<std::size_t>(values_.rows());
  }
  std::size_t points() const noexcept
  {
    return static_cast<std::size_t>(values_.cols());
  }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  /// Rows `rows` of this matrix, in the given order.
  SampleMatrix select_rows(const std::vector<std::size_t>& rows) const;

private:
  Eigen::MatrixXd values_;
};

struct EmpiricalCovariance
{
  /// z_{j,k} = (n-1)^-1 sum_i (Y_{i,j} Y_{i,k} - Ybar_j Ybar_k), symmetric.
  Eigen::MatrixXd z;
  Eigen::VectorXd means;
};

/// Throws std::invalid_argument when n < 2.
EmpiricalCovariance empirical_covariance(const SampleMatrix& samples);

/// Kernel values at evaluation points of the upper triangle. Values at holes
/// are NaN and listed in holes().
class CovarianceSurface
{
public:
  CovarianceSurface(TriangleGrid evals,
                    std::vector<double> values,
                    std::vector<std::size_t> holes = {},
                    std::optional<SmootherConfig> config = std::nullopt);

  /// Tabulates `kernel` at every evaluation point.
  static CovarianceSurface from_kernel(
    const TriangleGrid& evals,
    const std::function<double(double, double)>& kernel);

  const TriangleGrid& evals() const noexcept { return evals_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const noexcept { return values_[i]; }
  const std::vector<std::size_t>& holes() const noexcept { return holes_; }
  bool has_holes() const noexcept { return !holes_.empty(); }
  bool is_hole(std::size_t i) const noexcept;
  const std::optional<SmootherConfig>& config() const noexcept
  {
    return config_;
  }
  std::size_t size() const noexcept { return values_.size(); }

  /// Storage index of (min(x,y), max(x,y)), if it is an evaluation point.
  std::optional<std::size_t> find(double x, double y) const;

private:
  TriangleGrid evals_;
  std::vector<double> values_;
  std::vector<std::size_t> holes_;
  std::vector<char> hole_mask_;
  std::optional<SmootherConfig> config_;
  std::map<std::pair<double, double>, std::size_t> index_;
};

/// Smooths a given p x p matrix of empirical covariances with `field`.
CovarianceSurface smooth(const WeightField& field, const Eigen::MatrixXd& z);

/// Restricted (or off-diagonal, per config.domain) local polynomial
/// estimate of the covariance kernel at `evals`.
CovarianceSurface estimate(const SampleMatrix& samples,
                           const DesignGrid& grid,
                           const SmootherConfig& config,
                           const TriangleGrid& evals);

/// Same as estimate() with the weight field taken from `cache`.
CovarianceSurface estimate(const SampleMatrix& samples,
                           const DesignGrid& grid,
                           const SmootherConfig& config,
                           const TriangleGrid& evals,
                           WeightCache& cache);

/// Gamma(x, y) with Gamma(x, y) = Gamma(y, x). Throws NotFoundError when the
/// sorted pair is not an evaluation point.
double mirror_query(const CovarianceSurface& surface, double x, double y);

struct StdPoint
{
  double x;
  double sd;
  bool clamped; ///< Gamma(x, x) was negative and has been clamped to 0.
  bool hole;
};

struct StdCurve
{
  std::vector<StdPoint> points;
  std::size_t clamp_count = 0;
};

/// sd(x) = sqrt(max(Gamma(x, x), 0)) over the diagonal evaluation points,
/// ordered by x.
StdCurve std_curve(const CovarianceSurface& surface);

/// rho(x, y) = Gamma(x, y) / (sd(x) sd(y)) clamped to [-1, 1]. Points whose
/// standard deviations fall below `sd_floor`, or whose diagonal entries are
/// missing, become holes.
CovarianceSurface correlation_surface(const CovarianceSurface& surface,
                                      double sd_floor = 1e-6);

} // namespace covsmooth
