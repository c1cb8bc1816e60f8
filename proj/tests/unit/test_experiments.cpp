#include "covsmooth/errors.hpp"
#include "covsmooth/experiments.hpp"

#include "../oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace covsmooth;

namespace {

SmootherConfig config(unsigned m, double h)
{
  SmootherConfig cfg;
  cfg.order = PolyOrder(m);
  cfg.bandwidth = h;
  return cfg;
}

} // namespace

TEST_CASE("sup error")
{
  const auto grid = make_equidistant_grid(10);
  const auto evals = triangle_eval_grid(grid);
  const auto truth = [](double s, double t) { return oracle::ou(s, t); };
  const auto self = CovarianceSurface::from_kernel(evals, truth);
  CHECK(sup_error(self, truth) == 0.0);

  // Surface 0 against OU on a fine lattice: the maximum is the variance at 1.
  const auto fine = lattice_eval_grid(101);
  const auto zero = CovarianceSurface::from_kernel(fine, [](double, double) { return 0.0; });
  CHECK(sup_error(zero, truth) == doctest::Approx(0.665014).epsilon(1e-6));

  const double delta = 0.01;
  const auto shifted = CovarianceSurface::from_kernel(
    evals, [&](double s, double t) { return truth(s, t) + delta; });
  CHECK(sup_error(shifted, truth) <= delta + 1e-15);

  const CovarianceSurface holey(TriangleGrid({ { 0.1, 0.2 } }), { 0.0 }, { 0 });
  CHECK_THROWS_AS(sup_error(holey, truth), InvalidStateError);
}

TEST_CASE("decomposition identity")
{
  const auto grid = make_equidistant_grid(12);
  const auto field =
    compute_weight_field(grid, config(1, 0.4), triangle_eval_grid(grid));
  const auto truth = [](double s, double t) { return oracle::ou(s, t); };
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rep = simulate_replication(OrnsteinUhlenbeck{}, 30, grid, 0.75, RngSpec(seed));
    const auto t = decompose(rep.latent, rep.noise, field, truth);
    CHECK(t.identity_residual() <= 1e-9);
  }
  SUBCASE("no noise means no eps2 and no mix")
  {
    const auto rep = simulate_replication(OrnsteinUhlenbeck{}, 30, grid, 0.0, RngSpec(1));
    const auto t = decompose(rep.latent, rep.noise, field, truth);
    for (std::size_t i = 0; i < t.total.size(); ++i) {
      CHECK(t.eps2[i] == 0.0);
      CHECK(t.mix[i] == 0.0);
    }
  }
}

TEST_CASE("decomposition study reports one column per error term")
{
  DecompositionConfig cfg;
  cfg.n = 40;
  cfg.p = 12;
  cfg.reps = 3;
  cfg.smoother = config(1, 0.4);
  cfg.rng = RngSpec(2);
  const auto r = decomposition_study(cfg);
  CHECK(r.sup_norms.rows() == 3);
  for (double v : r.residuals)
    CHECK(v <= 1e-9);
  CHECK(r.report.find("dsc").size() == 3);
  CHECK(r.report.find("sup").size() == 3);
  CHECK(r.report.find("indep").empty());
  cfg.include_indep = true;
  CHECK(decomposition_study(cfg).report.find("indep").size() == 3);
}

TEST_CASE("bandwidth sweep")
{
  SUBCASE("degenerate data has zero error")
  {
    SweepConfig cfg;
    cfg.process = OrnsteinUhlenbeck{ 3.0, 0.0 };
    cfg.noise_sd = 0.0;
    cfg.n = 20;
    cfg.p = 10;
    cfg.reps = 2;
    cfg.h_grid = { 0.3, 0.6 };
    const auto r = bandwidth_sweep(cfg);
    CHECK(r.errors.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("reports, argmins and determinism")
  {
    SweepConfig cfg;
    cfg.n = 50;
    cfg.p = 12;
    cfg.reps = 4;
    cfg.h_grid = { 0.02, 0.2, 0.4 };
    cfg.rng = RngSpec(5);
    const auto r = bandwidth_sweep(cfg);
    CHECK(std::isinf(r.mean[0]));
    CHECK(r.best_h != 0.02);
    CHECK(r.rep_argmin_h.size() == 4);
    CHECK(r.report.find("sup_error").size() == 12);
    const auto again = bandwidth_sweep(cfg);
    CHECK(again.errors == r.errors);
  }
  SUBCASE("more replications shrink the standard error")
  {
    SweepConfig cfg;
    cfg.n = 40;
    cfg.p = 10;
    cfg.h_grid = { 0.3 };
    cfg.reps = 20;
    const double se20 = bandwidth_sweep(cfg).std_error[0];
    cfg.reps = 80;
    const double se80 = bandwidth_sweep(cfg).std_error[0];
    CHECK(se80 / se20 == doctest::Approx(0.5).epsilon(0.35));
  }
}

TEST_CASE("estimator comparison bookkeeping")
{
  ComparisonConfig cfg;
  cfg.n = 30;
  cfg.p = 10;
  cfg.reps = 2;
  cfg.orders = { 1 };
  cfg.h_grid = { 0.3, 0.5 };
  const auto r = estimator_comparison(cfg);
  CHECK(r.curves.size() == 4);
  CHECK(r.curve("ou", PairDomain::UpperTriangle, 1).pairs_used == 45);
  CHECK(r.curve("ou", PairDomain::OffDiagonal, 1).pairs_used == 90);
  CHECK_THROWS_AS(r.curve("bm", PairDomain::OffDiagonal, 1), NotFoundError);
}

TEST_CASE("fourth-moment variance")
{
  CHECK(gaussian_fourth_moment_variance(TwoTerm{}, 0, 0) ==
        doctest::Approx(2.0 * (8.0 / 9.0) * (8.0 / 9.0)));
  CHECK(gaussian_fourth_moment_variance(OrnsteinUhlenbeck{}, 0.25, 0.75) ==
        doctest::Approx(oracle::ou(.25, .25) * oracle::ou(.75, .75) +
                        std::pow(oracle::ou(.25, .75), 2)));
}

TEST_CASE("Isserlis identity for the two-term process, by Monte Carlo")
{
  const auto grid = DesignGrid({ 0.0, 0.4, 1.0 });
  const auto z = simulate_latent(TwoTerm{}, 200000, grid, RngSpec(77));
  const Eigen::ArrayXd sq = z.col(0).array().square();
  const double mean = sq.mean();
  const double var = (sq - mean).square().mean();
  const double se = std::sqrt((sq - mean).pow(4).mean() / 200000.0);
  const double theory = gaussian_fourth_moment_variance(TwoTerm{}, 0, 0);
  CHECK(std::fabs(var - theory) <= 4.0 * se + 1e-3);
  CHECK(theory == doctest::Approx(1.580247).epsilon(1e-6));
}

TEST_CASE("log-log slope")
{
  const std::vector<double> x{ 100, 400, 1600 }, y{ 1.0, 0.5, 0.25 };
  CHECK(log_log_slope(x, y) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(log_log_slope(std::vector<double>{ 1 }, std::vector<double>{ 1 }),
                  std::invalid_argument);
}

TEST_CASE("rate table and cv study are reproducible")
{
  RateConfig rc;
  rc.n_list = { 40, 80 };
  rc.p_rule = [](std::size_t) { return std::size_t{ 10 }; };
  rc.h_grid = { 0.3, 0.5 };
  rc.reps = 2;
  rc.rng = RngSpec(4);
  const auto a = rate_table(rc), b = rate_table(rc);
  REQUIRE(a.entries.size() == 2);
  CHECK(a.slope == b.slope);
  CHECK(a.entries[1].p == 10);

  CvStudyConfig cc;
  cc.n = 40;
  cc.p = 10;
  cc.reps = 3;
  cc.h_grid = { 0.2, 0.4, 0.6 };
  const auto c = cv_study(cc);
  CHECK(c.selected_h.size() == 3);
  CHECK(cv_study(cc).selected_h == c.selected_h);
  CHECK(c.report.find("median_selected_h").size() == 1);
}
