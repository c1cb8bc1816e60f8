#pragma once

#include "covsmooth/design_grid.hpp"
#include "covsmooth/estimator.hpp"
#include "covsmooth/rng.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <string>
#include <variant>

namespace covsmooth {

/// Ornstein-Uhlenbeck process started at 0,
///   Z_t = sigma int_0^t exp(-theta (t - s)) dB_s.
struct OrnsteinUhlenbeck
{
  double theta = 3.0;
  double sigma = 2.0;
};

/// Rank-two Gaussian process
///   Z(x) = (2/3) N1 sin(pi x) + (2 sqrt(2) / 3) N2 cos(4 pi x / 5),
/// smooth on the whole square.
struct TwoTerm
{
};

/// Brownian motion with diffusion sigma.
struct BrownianMotion
{
  double sigma = 1.0;
};

using ProcessSpec = std::variant<OrnsteinUhlenbeck, TwoTerm, BrownianMotion>;

/// Throws std::invalid_argument for theta <= 0 or sigma < 0.
void validate(const ProcessSpec& spec);
std::string describe(const ProcessSpec& spec);

/// sigma^2 / (2 theta) (exp(-theta |t - s|) - exp(-theta (s + t))).
double ou_kernel(double s, double t, double theta, double sigma);
/// (4/9) sin(pi x) sin(pi y) + (8/9) cos(4 pi x / 5) cos(4 pi y / 5).
double two_term_kernel(double x, double y);
/// sigma^2 min(s, t).
double bm_kernel(double s, double t, double sigma);

/// Covariance kernel of `spec`.
double kernel(const ProcessSpec& spec, double s, double t);

/// Latent curves Z_i(x_j), exact in law at the grid points. Curve i draws
/// from rng.substream(i). Returns an n x p matrix (n >= 1).
Eigen::MatrixXd simulate_latent(const ProcessSpec& spec,
                                std::size_t n,
                                const DesignGrid& grid,
                                const RngSpec& rng);

/// Latent curves as a SampleMatrix (requires n >= 2).
SampleMatrix simulate(const ProcessSpec& spec,
                      std::size_t n,
                      const DesignGrid& grid,
                      const RngSpec& rng);

SampleMatrix simulate_ou(std::size_t n,
                         const DesignGrid& grid,
                         double theta,
                         double sigma,
                         const RngSpec& rng);
SampleMatrix simulate_two_term(std::size_t n,
                               const DesignGrid& grid,
                               const RngSpec& rng);
SampleMatrix simulate_bm(std::size_t n,
                         const DesignGrid& grid,
                         double sigma,
                         const RngSpec& rng);

/// Independent N(0, noise_sd^2) errors, n x p; row i from rng.substream(i).
Eigen::MatrixXd noise_matrix(std::size_t n,
                             std::size_t p,
                             double noise_sd,
                             const RngSpec& rng);

/// samples + noise_matrix(...). noise_sd == 0 returns an exact copy.
SampleMatrix add_noise(const SampleMatrix& samples,
                       double noise_sd,
                       const RngSpec& rng);

} // namespace covsmooth
