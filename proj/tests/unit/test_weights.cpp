#include "covsmooth/weights.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace covsmooth;

namespace {

SmootherConfig make_config(unsigned m,
                           double h,
                           KernelKind kernel = KernelKind::EpanechnikovProduct,
                           PairDomain domain = PairDomain::UpperTriangle)
{
  SmootherConfig cfg;
  cfg.order = PolyOrder(m);
  cfg.bandwidth = h;
  cfg.kernel = kernel;
  cfg.domain = domain;
  return cfg;
}

} // namespace

TEST_CASE("smoother configuration validation")
{
  CHECK_NOTHROW(make_config(1, 1.0).validate());
  CHECK_THROWS_AS(make_config(1, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_config(1, 1.5).validate(), std::invalid_argument);
  auto cfg = make_config(1, 0.3);
  cfg.min_eigen_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(parse_pair_domain("offdiag") == PairDomain::OffDiagonal);
  CHECK_THROWS_AS(parse_pair_domain("full"), std::invalid_argument);
}

TEST_CASE("Gram matrix")
{
  const auto grid = make_equidistant_grid(4);
  SUBCASE("constant basis, uniform kernel, every pair in the window")
  {
    const auto b =
      build_gram({ 0.5, 0.5 }, grid, make_config(0, 1.0, KernelKind::Uniform));
    REQUIRE(b.rows() == 1);
    CHECK(b(0, 0) == doctest::Approx(6.0 / 16.0));
  }
  SUBCASE("order 0 is the scaled kernel mass")
  {
    const auto cfg = make_config(0, 0.5);
    const auto b = build_gram({ 0.4, 0.6 }, grid, cfg);
    double mass = 0.0;
    for (int j = 0; j < 4; ++j)
      for (int k = j + 1; k < 4; ++k)
        mass += kernel_eval(cfg.kernel, (grid[j] - 0.4) / 0.5,
                            (grid[k] - 0.6) / 0.5);
    CHECK(b(0, 0) == doctest::Approx(mass / 4.0));
  }
  SUBCASE("empty window gives the zero matrix")
  {
    const auto b = build_gram({ 0.0, 0.0 }, make_equidistant_grid(10),
                               make_config(1, 0.04));
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("symmetric positive semidefinite")
  {
    const auto b =
      build_gram({ 0.2, 0.7 }, make_equidistant_grid(20), make_config(2, 0.3));
    CHECK((b - b.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("constant fit with the uniform kernel is the local mean")
{
  const auto grid = make_equidistant_grid(20);
  const TriangleGrid evals({ { 0.4, 0.6 } });
  const auto field =
    compute_weight_field(grid, make_config(0, 0.2, KernelKind::Uniform), evals);
  const auto& pairs = field.at(0).pairs;
  REQUIRE(!pairs.empty());
  for (const auto& pw : pairs)
    CHECK(pw.w == doctest::Approx(1.0 / static_cast<double>(pairs.size())));
}

TEST_CASE("weights match a dense least-squares solve")
{
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t p = 6 + trial % 5;
    const auto grid = make_equidistant_grid(p);
    std::vector<double> pts(grid.points().begin(), grid.points().end());
    const unsigned m = static_cast<unsigned>(trial % 3);
    const double h = 0.45 + 0.5 * unit(gen);
    const bool epa = trial % 2 == 0;
    const bool off = trial % 4 == 3;
    double x = unit(gen), y = unit(gen);
    if (x > y)
      std::swap(x, y);
    const auto cfg = make_config(
      m, h, epa ? KernelKind::EpanechnikovProduct : KernelKind::Uniform,
      off ? PairDomain::OffDiagonal : PairDomain::UpperTriangle);
    const auto field = compute_weight_field(grid, cfg, TriangleGrid({ { x, y } }));
    const auto& local = field.at(0);
    if (local.hole || local.effective_order != m)
      continue;
    const auto ref = oracle::dense_local_weights(pts, x, y, h, static_cast<int>(m),
                                                 epa, off);
    REQUIRE(ref.size() == local.pairs.size());
    for (const auto& pw : local.pairs) {
      const auto it = ref.find({ static_cast<int>(pw.j), static_cast<int>(pw.k) });
      REQUIRE(it != ref.end());
      CHECK(std::fabs(pw.w - it->second) <= 1e-9);
    }
  }
}

TEST_CASE("weight axioms hold on every field")
{
  for (unsigned m : { 0u, 1u, 2u }) {
    for (double h : { 0.1, 0.3, 0.7 }) {
      const auto grid = make_equidistant_grid(25);
      const auto field =
        compute_weight_field(grid, make_config(m, h), triangle_eval_grid(grid));
      const auto report = verify_weight_axioms(field);
      CHECK(report.holes == 0);
      CHECK(report.moment_residual <= 1e-8);
      CHECK(report.support_residual == 0.0);
      CHECK(std::isfinite(report.magnitude_constant));
      CHECK(std::isfinite(report.lipschitz_constant));
    }
  }
}

TEST_CASE("absolute weight mass stays bounded as p grows at fixed h")
{
  std::vector<double> mass;
  for (std::size_t p : { 25u, 50u, 100u }) {
    const auto grid = make_equidistant_grid(p);
    const auto field = compute_weight_field(grid, make_config(1, 0.3),
                                            lattice_eval_grid(9));
    mass.push_back(verify_weight_axioms(field).magnitude_constant);
  }
  CHECK(mass[2] < 2.0 * mass[0]);
  CHECK(mass[1] < 2.0 * mass[0]);
}

TEST_CASE("eigenvalue guard lowers the order and marks holes")
{
  const auto grid = make_equidistant_grid(10);
  SUBCASE("a window with three pairs cannot carry a quadratic fit")
  {
    // At (0.05, 0.15) with h = 0.1 the window holds three pairs j < k,
    // too few for the six quadratic coefficients.
    const auto field = compute_weight_field(
      grid, make_config(2, 0.1, KernelKind::Uniform), TriangleGrid({ { 0.05, 0.15 } }));
    const auto& local = field.at(0);
    CHECK_FALSE(local.hole);
    CHECK(local.effective_order < 2);
    double sum = 0.0;
    for (const auto& pw : local.pairs)
      sum += pw.w;
    CHECK(sum == doctest::Approx(1.0));
  }
  SUBCASE("an empty window is a hole")
  {
    const auto field = compute_weight_field(grid, make_config(1, 0.04),
                                            TriangleGrid({ { 0.05, 0.05 }, { 0.2, 0.8 } }));
    CHECK(field.at(0).hole);
    CHECK(field.has_holes());
    CHECK(field.holes() == std::vector<std::size_t>{ 0, 1 });
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(10, 10);
    CHECK(std::isnan(field.apply(z)[0]));
  }
  SUBCASE("effective order never exceeds the configured one")
  {
    const auto field = compute_weight_field(grid, make_config(2, 0.25),
                                            triangle_eval_grid(grid));
    for (std::size_t i = 0; i < field.size(); ++i)
      CHECK(field.at(i).effective_order <= 2);
  }
}

TEST_CASE("pair domains")
{
  const auto grid = make_equidistant_grid(8);
  const auto evals = TriangleGrid({ { 0.5, 0.5 } });
  const auto tri = compute_weight_field(grid, make_config(0, 1.0, KernelKind::Uniform), evals);
  const auto off = compute_weight_field(
    grid, make_config(0, 1.0, KernelKind::Uniform, PairDomain::OffDiagonal), evals);
  CHECK(tri.at(0).pairs.size() == 28);
  CHECK(off.at(0).pairs.size() == 56);
  for (const auto& pw : tri.at(0).pairs)
    CHECK(pw.j < pw.k);
  for (const auto& pw : off.at(0).pairs)
    CHECK(pw.j != pw.k);
}

TEST_CASE("weight cache returns the same field for the same key")
{
  WeightCache cache;
  const auto grid = make_equidistant_grid(12);
  const auto evals = triangle_eval_grid(grid);
  const auto a = cache.get(grid, make_config(1, 0.3), evals);
  const auto b = cache.get(grid, make_config(1, 0.3), evals);
  const auto c = cache.get(grid, make_config(1, 0.4), evals);
  CHECK(a.get() == b.get());
  CHECK(a.get() != c.get());
  CHECK(cache.size() == 2);
  cache.clear();
  CHECK(cache.size() == 0);
}
