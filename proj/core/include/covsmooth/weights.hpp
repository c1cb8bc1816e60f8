#pragma once

#include "covsmooth/basis.hpp"
#include "covsmooth/design_grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace covsmooth {

/// Which observation pairs (j, k) enter the smoother.
enum class PairDomain
{
  UpperTriangle, ///< j < k: the restricted estimator.
  OffDiagonal    ///< j != k: smooths across the diagonal, drops only j == k.
};

std::string_view to_string(PairDomain domain) noexcept;
/// Parses "triangle" or "offdiag".
PairDomain parse_pair_domain(std::string_view name);

struct SmootherConfig
{
  PolyOrder order{ 1 };
  double bandwidth = 0.3;
  KernelKind kernel = KernelKind::EpanechnikovProduct;
  PairDomain domain = PairDomain::UpperTriangle;
  double min_eigen_tol = 1e-8;

  /// Throws std::invalid_argument unless 0 < h <= 1 and min_eigen_tol > 0.
  void validate() const;
};

struct PairWeight
{
  std::uint32_t j;
  std::uint32_t k;
  double w;
};

/// Weights of one evaluation point. Only pairs with positive kernel mass
/// inside the closed window are stored.
struct LocalWeights
{
  std::vector<PairWeight> pairs;
  double min_eigenvalue = 0.0;
  unsigned effective_order = 0;
  bool hole = false;
};

/// Data-independent linear map from empirical covariances z_{j,k} to
/// estimates at the evaluation points.
class WeightField
{
public:
  WeightField(DesignGrid grid,
              SmootherConfig config,
              TriangleGrid evals,
              std::vector<LocalWeights> local);

  const DesignGrid& grid() const noexcept { return grid_; }
  const SmootherConfig& config() const noexcept { return config_; }
  const TriangleGrid& evals() const noexcept { return evals_; }
  const LocalWeights& at(std::size_t i) const noexcept { return local_[i]; }
  std::size_t size() const noexcept { return local_.size(); }

  std::vector<std::size_t> holes() const;
  bool has_holes() const noexcept { return hole_count_ > 0; }

  /// sum_{pairs} w_{j,k} z(j, k) per evaluation point; NaN at holes.
  /// `z` must be p x p.
  std::vector<double> apply(const Eigen::MatrixXd& z) const;

  /// Same as apply() for a single evaluation point.
  double apply_at(std::size_t i, const Eigen::MatrixXd& z) const;

private:
  DesignGrid grid_;
  SmootherConfig config_;
  TriangleGrid evals_;
  std::vector<LocalWeights> local_;
  std::size_t hole_count_ = 0;
};

/// Local Gram matrix
///   B = (p h)^-2 sum_{pairs} U(d) U(d)^T K(d),  d = ((x_j - x)/h, (x_k - y)/h)
/// over the configured pair domain, at the configured order.
Eigen::MatrixXd build_gram(EvalPoint eval,
                           const DesignGrid& grid,
                           const SmootherConfig& config);

/// Solves the local normal equations at every evaluation point. When the
/// smallest eigenvalue of B drops below min_eigen_tol * trace(B) / N_m the
/// order is lowered step by step down to 0; an empty window is a hole.
WeightField compute_weight_field(const DesignGrid& grid,
                                 const SmootherConfig& config,
                                 const TriangleGrid& evals);

/// Worst-case measured constants of the weight axioms.
struct WeightAxiomReport
{
  /// max |sum w - 1| and max |sum w (x_j-x)^r1 (x_k-y)^r2| / h^(r1+r2)
  /// for 1 <= r1 + r2 <= effective order.
  double moment_residual = 0.0;
  /// max |w| over pairs outside the closed window or the pair domain.
  double support_residual = 0.0;
  /// max |w| (p h)^2.
  double magnitude_constant = 0.0;
  /// max over consecutive evaluation points of
  /// |w - w'| (p h)^2 / min(shift / h, 1).
  double lipschitz_constant = 0.0;
  std::size_t holes = 0;
};

WeightAxiomReport verify_weight_axioms(const WeightField& field);

/// Thread-safe memo of weight fields keyed by (grid, config, evals).
class WeightCache
{
public:
  std::shared_ptr<const WeightField> get(const DesignGrid& grid,
                                         const SmootherConfig& config,
                                         const TriangleGrid& evals);
  std::size_t size() const;
  void clear();

private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const WeightField>> fields_;
};

} // namespace covsmooth
