#pragma once

#include "covsmooth/bandwidth_cv.hpp"
#include "covsmooth/design_grid.hpp"
#include "covsmooth/estimator.hpp"
#include "covsmooth/processes.hpp"
#include "covsmooth/rng.hpp"
#include "covsmooth/weights.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace covsmooth {

/// One row of a long-format experiment table. Empty optionals are written
/// as NA.
struct ReportRow
{
  std::string experiment;
  std::size_t n = 0;
  std::size_t p = 0;
  std::optional<double> h;
  std::optional<unsigned> m;
  std::optional<std::size_t> replication;
  std::string metric;
  double value = 0.0;
};

struct ExperimentReport
{
  std::vector<ReportRow> rows;

  void add(ReportRow row) { rows.push_back(std::move(row)); }
  void append(const ExperimentReport& other);
  /// Rows whose metric equals `metric`.
  std::vector<const ReportRow*> find(const std::string& metric) const;
};

/// max_i |surface_i - truth(x_i, y_i)| over the evaluation points. Throws
/// InvalidStateError (with the hole locations) when the surface has holes.
double sup_error(const CovarianceSurface& surface,
                 const std::function<double(double, double)>& truth);

/// Synthetic data of one Monte Carlo replication: the latent curves, the
/// observation errors and their sum. Replication r of a study seeded with
/// `rng` uses rng.substream(r); within it substream 0 drives the process and
/// substream 1 the errors.
struct Replication
{
  Eigen::MatrixXd latent;
  Eigen::MatrixXd noise;
  SampleMatrix observed;
};

Replication simulate_replication(const ProcessSpec& process,
                                 std::size_t n,
                                 const DesignGrid& grid,
                                 double noise_sd,
                                 const RngSpec& replication_rng);

// ---------------------------------------------------------------------------
// Bandwidth sweep

struct SweepConfig
{
  ProcessSpec process = OrnsteinUhlenbeck{};
  std::size_t n = 400;
  std::size_t p = 50;
  double noise_sd = 0.75;
  /// order, kernel, domain; the bandwidth field is ignored.
  SmootherConfig smoother;
  std::vector<double> h_grid;
  std::size_t reps = 100;
  RngSpec rng;
};

struct SweepResult
{
  std::vector<double> h_grid;
  /// errors(rep, h_index); +inf where the surface had holes.
  Eigen::MatrixXd errors;
  std::vector<double> mean;
  std::vector<double> std_error;
  std::size_t best_index = 0;
  double best_h = 0.0;
  /// Error-minimizing bandwidth of each replication.
  std::vector<double> rep_argmin_h;
  ExperimentReport report;
};

/// Sup-norm error of the estimator over design pairs j <= k for every
/// bandwidth and replication. Ties in the mean curve go to the smaller h.
SweepResult bandwidth_sweep(const SweepConfig& config);

// ---------------------------------------------------------------------------
// Error decomposition

/// The smoothed components of Gamma_hat - Gamma at each evaluation point:
///   eps2  sum w (1/n) sum_i e_ij e_ik
///   bias  sum w (Gamma(x_j, x_k) - Gamma(x, y))
///   prc   sum w (1/n) sum_i (Z_ij Z_ik - Gamma(x_j, x_k))
///   mix   sum w (1/n) sum_i (Z_ij e_ik + Z_ik e_ij)
///   indep sum w (n (n-1))^-1 sum_{i != l} (e_ij e_lk + Z_ij Z_lk
///                                          + Z_ij e_lk + e_ij Z_lk)
/// with eps2 + bias + prc + mix - indep = total = Gamma_hat - Gamma.
struct DecompositionTerms
{
  std::vector<double> eps2;
  std::vector<double> bias;
  std::vector<double> prc;
  std::vector<double> mix;
  std::vector<double> indep;
  std::vector<double> total;

  /// max over points of |eps2 + bias + prc + mix - indep - total|.
  double identity_residual() const;
};

DecompositionTerms decompose(const Eigen::MatrixXd& latent,
                             const Eigen::MatrixXd& noise,
                             const WeightField& field,
                             const std::function<double(double, double)>& truth);

struct DecompositionConfig
{
  ProcessSpec process = OrnsteinUhlenbeck{};
  std::size_t n = 100;
  std::size_t p = 25;
  double noise_sd = 0.75;
  SmootherConfig smoother;
  std::size_t reps = 100;
  RngSpec rng;
  /// Also report the sup-norm of the indep term.
  bool include_indep = false;
  double identity_tolerance = 1e-9;
};

struct DecompositionResult
{
  /// Columns: dsc (bias), eps (eps2), mix, prc, indep, sup (total).
  Eigen::MatrixXd sup_norms;
  std::vector<double> residuals;
  ExperimentReport report;

  static constexpr const char* columns[] = { "dsc", "eps", "mix",
                                             "prc", "indep", "sup" };
};

/// Throws InternalError when a replication violates the identity by more
/// than identity_tolerance.
DecompositionResult decomposition_study(const DecompositionConfig& config);

// ---------------------------------------------------------------------------
// Restricted versus off-diagonal estimator

struct ComparisonConfig
{
  std::size_t n = 100;
  std::size_t p = 50;
  double noise_sd = 0.75;
  std::vector<unsigned> orders{ 0, 1, 2 };
  std::vector<double> h_grid;
  std::size_t reps = 100;
  RngSpec rng;
  KernelKind kernel = KernelKind::EpanechnikovProduct;
  /// Targets; defaults to OU(3, 2) and the two-term process.
  std::vector<ProcessSpec> targets{ OrnsteinUhlenbeck{}, TwoTerm{} };
};

struct ComparisonCurve
{
  std::string target;
  PairDomain domain;
  unsigned order;
  std::vector<double> mean; ///< per h
  std::size_t best_index = 0;
  double best_mean = 0.0;
  std::size_t pairs_used = 0; ///< pairs in the domain over the full grid
};

struct ComparisonResult
{
  std::vector<double> h_grid;
  std::vector<ComparisonCurve> curves;
  ExperimentReport report;

  const ComparisonCurve& curve(const std::string& target,
                               PairDomain domain,
                               unsigned order) const;
};

/// Both pair domains on each target with identical simulated data.
ComparisonResult estimator_comparison(const ComparisonConfig& config);

// ---------------------------------------------------------------------------
// Pointwise normal approximation

struct CltConfig
{
  ProcessSpec process = OrnsteinUhlenbeck{};
  std::size_t n = 400;
  std::size_t p = 100;
  /// The limiting covariance describes the latent process, so the default
  /// observes it without error.
  double noise_sd = 0.0;
  SmootherConfig smoother{ PolyOrder(1), 0.1 };
  std::vector<EvalPoint> points{ { 0.25, 0.75 }, { 0.5, 0.9 } };
  std::size_t reps = 500;
  RngSpec rng;
};

struct CltPoint
{
  EvalPoint point;
  double mean = 0.0;      ///< of sqrt(n) (Gamma_hat - Gamma)
  double variance = 0.0;  ///< unbiased sample variance of the same
  double mean_se = 0.0;   ///< standard error of `mean`
  double theory = 0.0;    ///< Gamma(x,x) Gamma(y,y) + Gamma(x,y)^2
  double ratio = 0.0;     ///< variance / theory
};

struct CltResult
{
  std::vector<CltPoint> points;
  ExperimentReport report;
};

/// Gaussian fourth-moment identity for the asymptotic covariance of
/// sqrt(n) (Gamma_hat - Gamma) at (x, y):
///   E[Z(x)^2 Z(y)^2] - Gamma(x,y)^2 = Gamma(x,x) Gamma(y,y) + Gamma(x,y)^2.
double gaussian_fourth_moment_variance(const ProcessSpec& process,
                                       double x,
                                       double y);

CltResult clt_check(const CltConfig& config);

// ---------------------------------------------------------------------------
// Rates in n

struct RateConfig
{
  ProcessSpec process = OrnsteinUhlenbeck{};
  std::vector<std::size_t> n_list{ 100, 400 };
  std::function<std::size_t(std::size_t)> p_rule = [](std::size_t) {
    return std::size_t{ 50 };
  };
  double noise_sd = 0.75;
  SmootherConfig smoother;
  std::vector<double> h_grid;
  std::size_t reps = 100;
  RngSpec rng;
};

struct RateEntry
{
  std::size_t n = 0;
  std::size_t p = 0;
  double best_h = 0.0;
  double mean_error = 0.0;
  SweepResult sweep;
};

struct RateResult
{
  std::vector<RateEntry> entries;
  /// Least-squares slope of log(mean error) against log(n).
  double slope = 0.0;
  ExperimentReport report;
};

/// Oracle (best-of-grid) mean sup error for each n. Sample size index i uses
/// rng.substream(i).
RateResult rate_table(const RateConfig& config);

// ---------------------------------------------------------------------------
// Cross-validation study

struct CvStudyConfig
{
  ProcessSpec process = OrnsteinUhlenbeck{};
  std::size_t n = 400;
  std::size_t p = 50;
  double noise_sd = 0.75;
  SmootherConfig smoother;
  std::vector<double> h_grid;
  std::size_t folds = 5;
  std::size_t reps = 50;
  RngSpec rng;
};

struct CvStudyResult
{
  std::vector<double> selected_h;
  ExperimentReport report;
};

/// Repeated K-fold selection on fresh data; replication r draws its data
/// from rng.substream(r) and its fold split from the seed of
/// rng.substream(r).substream(2).
CvStudyResult cv_study(const CvStudyConfig& config);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(std::span<const double> x, std::span<const double> y);

} // namespace covsmooth
