#include "covsmooth/processes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace covsmooth {

namespace {

template<class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_theta(double theta)
{
  if (!(theta > 0.0))
    throw std::invalid_argument("OU theta must be positive");
}

void check_sigma(double sigma)
{
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("sigma must be nonnegative");
}

} // namespace

void validate(const ProcessSpec& spec)
{
  std::visit(overloaded{ [](const OrnsteinUhlenbeck& ou) {
                          check_theta(ou.theta);
                          check_sigma(ou.sigma);
                        },
                         [](const TwoTerm&) {},
                         [](const BrownianMotion& bm) {
                           check_sigma(bm.sigma);
                         } },
             spec);
}

std::string describe(const ProcessSpec& spec)
{
  std::ostringstream out;
  std::visit(overloaded{ [&](const OrnsteinUhlenbeck& ou) {
                          out << "ou(theta=" << ou.theta
                              << ",sigma=" << ou.sigma << ")";
                        },
                         [&](const TwoTerm&) { out << "twoterm"; },
                         [&](const BrownianMotion& bm) {
                           out << "bm(sigma=" << bm.sigma << ")";
                         } },
             spec);
  return out.str();
}

double ou_kernel(double s, double t, double theta, double sigma)
{
  check_theta(theta);
  return sigma * sigma / (2.0 * theta) *
         (std::exp(-theta * std::abs(t - s)) - std::exp(-theta * (s + t)));
}

double two_term_kernel(double x, double y)
{
  using std::numbers::pi;
  // Products grouped so that the value is exactly symmetric in (x, y).
  return 4.0 / 9.0 * (std::sin(pi * x) * std::sin(pi * y)) +
         8.0 / 9.0 * (std::cos(0.8 * pi * x) * std::cos(0.8 * pi * y));
}

double bm_kernel(double s, double t, double sigma)
{
  return sigma * sigma * std::min(s, t);
}

double kernel(const ProcessSpec& spec, double s, double t)
{
  return std::visit(
    overloaded{
      [&](const OrnsteinUhlenbeck& ou) {
        return ou_kernel(s, t, ou.theta, ou.sigma);
      },
      [&](const TwoTerm&) { return two_term_kernel(s, t); },
      [&](const BrownianMotion& bm) { return bm_kernel(s, t, bm.sigma); } },
    spec);
}

Eigen::MatrixXd simulate_latent(const ProcessSpec& spec,
                                std::size_t n,
                                const DesignGrid& grid,
                                const RngSpec& rng)
{
  validate(spec);
  if (n < 1)
    throw std::invalid_argument("need at least one curve");
  const std::size_t p = grid.size();
  Eigen::MatrixXd z(static_cast<Eigen::Index>(n),
                    static_cast<Eigen::Index>(p));

  // Per-step transition constants shared by all curves.
  std::vector<double> decay(p, 0.0);
  std::vector<double> innov(p, 0.0);
  std::visit(
    overloaded{
      [&](const OrnsteinUhlenbeck& ou) {
        innov[0] = std::sqrt(ou_kernel(grid[0], grid[0], ou.theta, ou.sigma));
        for (std::size_t j = 1; j < p; ++j) {
          const double dt = grid[j] - grid[j - 1];
          decay[j] = std::exp(-ou.theta * dt);
          innov[j] = std::sqrt(ou.sigma * ou.sigma *
                               (1.0 - std::exp(-2.0 * ou.theta * dt)) /
                               (2.0 * ou.theta));
        }
      },
      [&](const TwoTerm&) {},
      [&](const BrownianMotion& bm) {
        innov[0] = bm.sigma * std::sqrt(grid[0]);
        for (std::size_t j = 1; j < p; ++j) {
          decay[j] = 1.0;
          innov[j] = bm.sigma * std::sqrt(grid[j] - grid[j - 1]);
        }
      } },
    spec);

  const bool rank_two = std::holds_alternative<TwoTerm>(spec);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    NormalSource normal(rng.substream(static_cast<std::uint64_t>(i)));
    auto row = z.row(i);
    if (rank_two) {
      using std::numbers::pi;
      const double a = 2.0 / 3.0 * normal();
      const double b = 2.0 * std::numbers::sqrt2 / 3.0 * normal();
      for (std::size_t j = 0; j < p; ++j)
        row[static_cast<Eigen::Index>(j)] =
          a * std::sin(pi * grid[j]) + b * std::cos(0.8 * pi * grid[j]);
    } else {
      double state = innov[0] * normal();
      row[0] = state;
      for (std::size_t j = 1; j < p; ++j) {
        state = decay[j] * state + innov[j] * normal();
        row[static_cast<Eigen::Index>(j)] = state;
      }
    }
  }
  return z;
}

SampleMatrix simulate(const ProcessSpec& spec,
                      std::size_t n,
                      const DesignGrid& grid,
                      const RngSpec& rng)
{
  return SampleMatrix(simulate_latent(spec, n, grid, rng));
}

SampleMatrix simulate_ou(std::size_t n,
                         const DesignGrid& grid,
                         double theta,
                         double sigma,
                         const RngSpec& rng)
{
  return simulate(OrnsteinUhlenbeck{ theta, sigma }, n, grid, rng);
}

SampleMatrix simulate_two_term(std::size_t n,
                               const DesignGrid& grid,
                               const RngSpec& rng)
{
  return simulate(TwoTerm{}, n, grid, rng);
}

SampleMatrix simulate_bm(std::size_t n,
                         const DesignGrid& grid,
                         double sigma,
                         const RngSpec& rng)
{
  return simulate(BrownianMotion{ sigma }, n, grid, rng);
}

Eigen::MatrixXd noise_matrix(std::size_t n,
                             std::size_t p,
                             double noise_sd,
                             const RngSpec& rng)
{
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd))
    throw std::invalid_argument("noise standard deviation must be >= 0");
  Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(p));
  if (noise_sd == 0.0)
    return eps;
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    NormalSource normal(rng.substream(static_cast<std::uint64_t>(i)));
    for (std::size_t j = 0; j < p; ++j)
      eps(i, static_cast<Eigen::Index>(j)) = noise_sd * normal();
  }
  return eps;
}

SampleMatrix add_noise(const SampleMatrix& samples,
                       double noise_sd,
                       const RngSpec& rng)
{
  const Eigen::MatrixXd eps =
    noise_matrix(samples.curves(), samples.points(), noise_sd, rng);
  if (noise_sd == 0.0)
    return samples;
  return SampleMatrix(samples.values() + eps);
}

} // namespace covsmooth
