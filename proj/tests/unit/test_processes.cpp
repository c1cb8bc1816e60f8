#include "covsmooth/processes.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace covsmooth;

TEST_CASE("OU kernel")
{
  for (double t : { 0.0, 0.3, 1.0 })
    CHECK(ou_kernel(0.0, t, 3, 2) == 0.0);
  CHECK(ou_kernel(1, 1, 3, 2) == doctest::Approx(4.0 / 6.0 * (1 - std::exp(-6.0))));
  CHECK(ou_kernel(1, 1, 3, 2) == doctest::Approx(0.665014).epsilon(1e-6));
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u;
  for (int i = 0; i < 100; ++i) {
    const double s = u(gen), t = u(gen);
    CHECK(ou_kernel(s, t, 3, 2) == ou_kernel(t, s, 3, 2));
    CHECK(ou_kernel(s, t, 3, 2) == doctest::Approx(oracle::ou(s, t)));
  }
  CHECK_THROWS_AS(ou_kernel(0.1, 0.2, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ou_kernel(0.1, 0.2, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("OU kernel has a diagonal kink of size sigma^2")
{
  const double s = 0.5, d = 1e-5, sigma = 2.0;
  const double right = (ou_kernel(s, s + d, 3, sigma) - ou_kernel(s, s, 3, sigma)) / d;
  const double left = (ou_kernel(s, s, 3, sigma) - ou_kernel(s, s - d, 3, sigma)) / d;
  CHECK(std::fabs(std::fabs(left - right) - sigma * sigma) <= 0.05 * sigma * sigma);
}

TEST_CASE("two-term and Brownian kernels")
{
  CHECK(two_term_kernel(0, 0) == doctest::Approx(8.0 / 9.0));
  for (double y : { 0.0, 0.2, 0.9 })
    CHECK(two_term_kernel(0, y) == doctest::Approx(8.0 / 9.0 * std::cos(0.8 * std::numbers::pi * y)));
  CHECK(two_term_kernel(0.3, 0.8) == two_term_kernel(0.8, 0.3));
  CHECK(bm_kernel(0.3, 0.7, 1) == 0.3);
  CHECK(bm_kernel(0.4, 0.4, 2) == doctest::Approx(1.6));
  CHECK(kernel(BrownianMotion{ 1.0 }, 0.2, 0.5) == 0.2);
  CHECK(describe(OrnsteinUhlenbeck{}) == "ou(theta=3,sigma=2)");
  CHECK_THROWS_AS(validate(OrnsteinUhlenbeck{ 0.0, 1.0 }), std::invalid_argument);
  CHECK_THROWS_AS(validate(BrownianMotion{ -1.0 }), std::invalid_argument);
}

TEST_CASE("simulators are deterministic and degenerate correctly")
{
  const auto grid = make_equidistant_grid(10);
  const RngSpec rng(42);
  const auto a = simulate_ou(30, grid, 3, 2, rng);
  const auto b = simulate_ou(30, grid, 3, 2, rng);
  CHECK(a.values() == b.values());
  const auto c = simulate_ou(30, grid, 3, 2, RngSpec(43));
  CHECK(a.values() != c.values());

  CHECK(simulate_latent(OrnsteinUhlenbeck{ 3.0, 0.0 }, 5, grid, rng).cwiseAbs().maxCoeff() == 0.0);
  CHECK(simulate_latent(BrownianMotion{ 0.0 }, 5, grid, rng).cwiseAbs().maxCoeff() == 0.0);

  // Curve i only depends on substream i: a larger sample extends a smaller.
  const auto small = simulate_latent(TwoTerm{}, 4, grid, rng);
  const auto large = simulate_latent(TwoTerm{}, 9, grid, rng);
  CHECK(large.topRows(4) == small);
}

TEST_CASE("two-term curves lie in a two-dimensional span")
{
  const auto grid = make_equidistant_grid(25);
  const auto z = simulate_latent(TwoTerm{}, 50, grid, RngSpec(3));
  Eigen::MatrixXd basis(25, 2);
  for (int j = 0; j < 25; ++j) {
    basis(j, 0) = std::sin(std::numbers::pi * grid[j]);
    basis(j, 1) = std::cos(0.8 * std::numbers::pi * grid[j]);
  }
  const auto qr = basis.colPivHouseholderQr();
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    const Eigen::VectorXd row = z.row(i).transpose();
    const Eigen::VectorXd coef = qr.solve(row);
    CHECK((basis * coef - row).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("noise")
{
  const auto grid = make_equidistant_grid(10);
  const auto clean = simulate_bm(20, grid, 1.0, RngSpec(1));
  const auto same = add_noise(clean, 0.0, RngSpec(2));
  CHECK(same.values() == clean.values());
  CHECK_THROWS_AS(add_noise(clean, -0.1, RngSpec(2)), std::invalid_argument);
  CHECK(add_noise(clean, 0.5, RngSpec(2)).values() ==
        add_noise(clean, 0.5, RngSpec(2)).values());

  const auto eps = noise_matrix(1000, 1000, 0.75, RngSpec(9));
  const double var = eps.array().square().mean() - std::pow(eps.mean(), 2);
  CHECK(std::fabs(var / (0.75 * 0.75) - 1.0) <= 0.01);
}

TEST_CASE("substreams are pure and distinct")
{
  const RngSpec root(123);
  CHECK(root.substream(5) == root.substream(5));
  CHECK(root.substream(5).seed() != root.substream(6).seed());
  CHECK(root.substream(0).seed() != root.seed());
  NormalSource a(root), b(root);
  for (int i = 0; i < 10; ++i)
    CHECK(a() == b());
}
