#include "cli.hpp"

#include "covsmooth/bandwidth_cv.hpp"
#include "covsmooth/design_grid.hpp"
#include "covsmooth/errors.hpp"
#include "covsmooth/estimator.hpp"
#include "covsmooth/experiments.hpp"
#include "covsmooth/io.hpp"
#include "covsmooth/processes.hpp"
#include "covsmooth/rng.hpp"
#include "covsmooth/weights.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace covsmooth::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep))
    parts.push_back(part);
  return parts;
}

double to_number(const std::string& text)
{
  const auto v = parse_double(text);
  if (!v || !std::isfinite(*v))
    throw std::invalid_argument("not a number: '" + text + "'");
  return *v;
}

/// Flags shared by every command that simulates a process.
struct ProcessFlags
{
  std::string name = "ou";
  double theta = 3.0;
  double sigma = 2.0;

  void add(CLI::App& app)
  {
    app.add_option("--process", name, "Latent process")
      ->check(CLI::IsMember({ "ou", "twoterm", "bm" }))
      ->capture_default_str();
    app
      .add_option("--theta", theta, "OU mean-reversion rate (ou only)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
    app
      .add_option("--sigma", sigma, "Diffusion scale (ou and bm)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  }

  ProcessSpec spec() const
  {
    if (name == "ou")
      return OrnsteinUhlenbeck{ theta, sigma };
    if (name == "twoterm")
      return TwoTerm{};
    return BrownianMotion{ sigma };
  }
};

/// Smoother flags; the bandwidth flag is only registered where it applies.
struct SmootherFlags
{
  unsigned order = 1;
  double bandwidth = 0.3;
  std::string kernel = "epanechnikov";
  std::string domain = "triangle";
  double min_eigen_tol = 1e-8;

  void add(CLI::App& app, bool with_bandwidth, bool with_domain = true)
  {
    app.add_option("--order", order, "Local polynomial order m")
      ->check(CLI::Range(0u, 8u))
      ->capture_default_str();
    if (with_bandwidth)
      app.add_option("--bandwidth", bandwidth, "Bandwidth h in (0, 1]")
        ->check(CLI::Range(1e-12, 1.0))
        ->capture_default_str();
    app.add_option("--kernel", kernel, "Product kernel")
      ->check(CLI::IsMember({ "uniform", "epanechnikov" }))
      ->capture_default_str();
    if (with_domain)
      app
        .add_option("--domain",
                    domain,
                    "Pairs smoothed: triangle (j<k) or offdiag (j!=k)")
        ->check(CLI::IsMember({ "triangle", "offdiag" }))
        ->capture_default_str();
    app
      .add_option("--min-eigen-tol",
                  min_eigen_tol,
                  "Relative eigenvalue floor of the local Gram matrix")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  }

  SmootherConfig config() const
  {
    SmootherConfig cfg;
    cfg.order = PolyOrder(order);
    cfg.bandwidth = bandwidth;
    cfg.kernel = parse_kernel_kind(kernel);
    cfg.domain = parse_pair_domain(domain);
    cfg.min_eigen_tol = min_eigen_tol;
    cfg.validate();
    return cfg;
  }
};

void add_seed(CLI::App& app, std::uint64_t& seed)
{
  app.add_option("--seed", seed, "Seed of all randomness")
    ->capture_default_str();
}

void add_out(CLI::App& app, std::string& path, const std::string& what)
{
  app.add_option("--out", path, what)->required();
}

void add_reps(CLI::App& app, std::size_t& reps)
{
  app.add_option("--reps", reps, "Monte Carlo replications")
    ->check(CLI::PositiveNumber)
    ->capture_default_str();
}

void add_noise(CLI::App& app, double& noise_sd)
{
  app
    .add_option("--noise-sd", noise_sd, "Standard deviation of the errors")
    ->check(CLI::NonNegativeNumber)
    ->capture_default_str();
}

/// One registered subcommand: its parser and the action run after parsing.
struct Command
{
  CLI::App* app;
  std::function<void(std::ostream&)> run;
};

} // namespace

std::vector<double> parse_h_grid(const std::string& text)
{
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("bandwidth grid must be A:B:STEP");
    return bandwidth_range(
      to_number(parts[0]), to_number(parts[1]), to_number(parts[2]));
  }
  std::vector<double> out;
  for (const auto& part : split(text, ','))
    out.push_back(to_number(part));
  if (out.empty())
    throw std::invalid_argument("empty bandwidth grid");
  for (double h : out)
    if (!(h > 0.0 && h <= 1.0))
      throw std::invalid_argument("bandwidths must lie in (0, 1]");
  if (!std::is_sorted(out.begin(), out.end()))
    throw std::invalid_argument("bandwidths must be ascending");
  return out;
}

int run(const std::vector<std::string>& args,
        std::ostream& out,
        std::ostream& err)
{
  CLI::App app{ "Covariance kernel estimation from synchronously observed "
                "noisy curves by restricted local polynomial smoothing.\n"
                "Surfaces are written as long CSV 'x,y,value' over x <= y; "
                "evaluation points without usable pairs (holes) are written "
                "as NA.",
                "covsmooth" };
  app.require_subcommand(1);
  std::vector<Command> commands;

  // estimate ---------------------------------------------------------------
  struct
  {
    std::string input;
    std::string grid = "header";
    SmootherFlags smoother;
    std::string out;
    std::string std_out;
    std::string corr_out;
    std::string weights_out;
  } est;
  {
    auto* sub = app.add_subcommand("estimate", "Estimate the covariance kernel");
    sub->add_option("--input", est.input, "Curve file (rows are curves)")
      ->required()
      ->check(CLI::ExistingFile);
    sub
      ->add_option("--grid",
                   est.grid,
                   "Design points: header, equidistant, or a grid file")
      ->capture_default_str();
    est.smoother.add(*sub, true);
    add_out(*sub, est.out, "Surface CSV (x,y,value)");
    sub->add_option("--std-out", est.std_out, "Standard deviation curve CSV");
    sub->add_option("--corr-out", est.corr_out, "Correlation surface CSV");
    sub->add_option(
      "--weights-out", est.weights_out, "Debug dump of the weights (x,y,j,k,w)");
    commands.push_back({ sub, [&](std::ostream& log) {
                          const auto data = read_samples(
                            est.input, GridSource::parse(est.grid));
                          const auto cfg = est.smoother.config();
                          const auto evals = triangle_eval_grid(data.grid);
                          const auto field =
                            compute_weight_field(data.grid, cfg, evals);
                          const auto surface = smooth(
                            field, empirical_covariance(data.samples).z);
                          write_surface(est.out, surface);
                          if (!est.std_out.empty())
                            write_std_curve(est.std_out, std_curve(surface));
                          if (!est.corr_out.empty())
                            write_surface(est.corr_out,
                                          correlation_surface(surface));
                          if (!est.weights_out.empty()) {
                            std::ofstream w(est.weights_out, std::ios::binary);
                            if (!w)
                              throw std::runtime_error(
                                "cannot open '" + est.weights_out +
                                "' for writing");
                            write_weights(w, field);
                          }
                          if (surface.has_holes())
                            log << "holes: " << surface.holes().size() << '\n';
                        } });
  }

  // cv ---------------------------------------------------------------------
  struct
  {
    std::string input;
    std::string grid = "header";
    std::size_t folds = 5;
    std::string h_grid = "0.05:1:0.05";
    SmootherFlags smoother;
    std::uint64_t seed = 0;
    std::string out;
  } cv;
  {
    auto* sub =
      app.add_subcommand("cv", "Select the bandwidth by K-fold cross-validation");
    sub->add_option("--input", cv.input, "Curve file")
      ->required()
      ->check(CLI::ExistingFile);
    sub->add_option("--grid", cv.grid, "header, equidistant, or a grid file")
      ->capture_default_str();
    sub->add_option("--folds", cv.folds, "Number of folds K")
      ->check(CLI::Range(std::size_t{ 2 }, std::size_t{ 1000000 }))
      ->capture_default_str();
    sub
      ->add_option("--h-grid", cv.h_grid, "Candidates A:B:STEP or a,b,c")
      ->capture_default_str();
    cv.smoother.add(*sub, false);
    add_seed(*sub, cv.seed);
    add_out(*sub, cv.out, "Report CSV with the score of every candidate");
    commands.push_back(
      { sub, [&](std::ostream& log) {
         const auto data =
           read_samples(cv.input, GridSource::parse(cv.grid));
         CVPlan plan{ cv.folds, parse_h_grid(cv.h_grid), cv.seed };
         const auto res =
           kfold_cv(data.samples, data.grid, cv.smoother.config(), plan);
         ExperimentReport report;
         const unsigned m = cv.smoother.order;
         for (std::size_t l = 0; l < res.h_candidates.size(); ++l)
           report.add({ "cv", data.samples.curves(), data.samples.points(),
                        res.h_candidates[l], m, std::nullopt, "cv_score",
                        res.scores[l] });
         report.add({ "cv", data.samples.curves(), data.samples.points(),
                      std::nullopt, m, std::nullopt, "selected_h",
                      res.chosen_h });
         write_report(cv.out, report);
         log << format_double(res.chosen_h) << '\n';
       } });
  }

  // simulate ---------------------------------------------------------------
  struct
  {
    ProcessFlags process;
    double noise_sd = 0.75;
    std::size_t n = 100;
    std::size_t p = 40;
    std::uint64_t seed = 0;
    std::string out;
  } sim;
  {
    auto* sub = app.add_subcommand(
      "simulate", "Simulate noisy curves on the equidistant design");
    sim.process.add(*sub);
    add_noise(*sub, sim.noise_sd);
    sub->add_option("--n", sim.n, "Number of curves")
      ->check(CLI::Range(std::size_t{ 2 }, std::size_t{ 100000000 }))
      ->capture_default_str();
    sub->add_option("--p", sim.p, "Number of design points")
      ->check(CLI::Range(std::size_t{ 2 }, std::size_t{ 100000 }))
      ->capture_default_str();
    add_seed(*sub, sim.seed);
    add_out(*sub, sim.out, "Curve file with a header row of design points");
    commands.push_back({ sub, [&](std::ostream&) {
                          const auto grid = make_equidistant_grid(sim.p);
                          const auto rep = simulate_replication(
                            sim.process.spec(), sim.n, grid, sim.noise_sd,
                            RngSpec(sim.seed));
                          write_samples(sim.out, rep.observed, grid);
                        } });
  }

  // decompose --------------------------------------------------------------
  DecompositionConfig dec;
  struct
  {
    ProcessFlags process;
    SmootherFlags smoother;
    std::uint64_t seed = 0;
    std::string out;
  } decf;
  {
    auto* sub = app.add_subcommand(
      "decompose", "Monte Carlo study of the error decomposition");
    decf.process.add(*sub);
    add_noise(*sub, dec.noise_sd);
    sub->add_option("--n", dec.n, "Number of curves")->capture_default_str();
    sub->add_option("--p", dec.p, "Number of design points")
      ->capture_default_str();
    decf.smoother.add(*sub, true);
    add_reps(*sub, dec.reps);
    sub->add_flag("--include-indep",
                  dec.include_indep,
                  "Also report the cross-curve term");
    add_seed(*sub, decf.seed);
    add_out(*sub, decf.out, "Report CSV");
    commands.push_back({ sub, [&](std::ostream&) {
                          dec.process = decf.process.spec();
                          dec.smoother = decf.smoother.config();
                          dec.rng = RngSpec(decf.seed);
                          write_report(decf.out,
                                       decomposition_study(dec).report);
                        } });
  }

  // sweep ------------------------------------------------------------------
  SweepConfig sw;
  struct
  {
    ProcessFlags process;
    SmootherFlags smoother;
    std::string h_grid = "0.05:1:0.05";
    std::uint64_t seed = 0;
    std::string out;
  } swf;
  {
    auto* sub = app.add_subcommand(
      "sweep", "Sup-norm error of the estimator across bandwidths");
    swf.process.add(*sub);
    add_noise(*sub, sw.noise_sd);
    sub->add_option("--n", sw.n, "Number of curves")->capture_default_str();
    sub->add_option("--p", sw.p, "Number of design points")
      ->capture_default_str();
    swf.smoother.add(*sub, false);
    sub->add_option("--h-grid", swf.h_grid, "A:B:STEP or a,b,c")
      ->capture_default_str();
    add_reps(*sub, sw.reps);
    add_seed(*sub, swf.seed);
    add_out(*sub, swf.out, "Report CSV");
    commands.push_back({ sub, [&](std::ostream& log) {
                          sw.process = swf.process.spec();
                          sw.smoother = swf.smoother.config();
                          sw.h_grid = parse_h_grid(swf.h_grid);
                          sw.rng = RngSpec(swf.seed);
                          const auto res = bandwidth_sweep(sw);
                          write_report(swf.out, res.report);
                          log << format_double(res.best_h) << '\n';
                        } });
  }

  // rates ------------------------------------------------------------------
  RateConfig rt;
  struct
  {
    ProcessFlags process;
    SmootherFlags smoother;
    std::string n_list = "100,400";
    std::size_t p = 50;
    std::string h_grid = "0.05:1:0.05";
    std::uint64_t seed = 0;
    std::string out;
  } rtf;
  {
    auto* sub = app.add_subcommand(
      "rates", "Oracle-bandwidth sup error as a function of n");
    rtf.process.add(*sub);
    add_noise(*sub, rt.noise_sd);
    sub->add_option("--n-list", rtf.n_list, "Comma separated sample sizes")
      ->capture_default_str();
    sub->add_option("--p", rtf.p, "Number of design points")
      ->capture_default_str();
    rtf.smoother.add(*sub, false);
    sub->add_option("--h-grid", rtf.h_grid, "A:B:STEP or a,b,c")
      ->capture_default_str();
    add_reps(*sub, rt.reps);
    add_seed(*sub, rtf.seed);
    add_out(*sub, rtf.out, "Report CSV");
    commands.push_back({ sub, [&](std::ostream& log) {
                          rt.process = rtf.process.spec();
                          rt.smoother = rtf.smoother.config();
                          rt.n_list.clear();
                          for (const auto& s : split(rtf.n_list, ','))
                            rt.n_list.push_back(
                              static_cast<std::size_t>(std::stoull(s)));
                          const std::size_t p = rtf.p;
                          rt.p_rule = [p](std::size_t) { return p; };
                          rt.h_grid = parse_h_grid(rtf.h_grid);
                          rt.rng = RngSpec(rtf.seed);
                          const auto res = rate_table(rt);
                          write_report(rtf.out, res.report);
                          log << "slope " << format_double(res.slope) << '\n';
                        } });
  }

  // compare ----------------------------------------------------------------
  ComparisonConfig cmp;
  struct
  {
    double theta = 3.0;
    double sigma = 2.0;
    std::string orders = "0,1,2";
    std::string kernel = "epanechnikov";
    std::string h_grid = "0.05:1:0.05";
    std::uint64_t seed = 0;
    std::string out;
  } cmpf;
  {
    auto* sub = app.add_subcommand(
      "compare",
      "Restricted versus off-diagonal estimator on the OU and two-term targets");
    sub->add_option("--theta", cmpf.theta, "OU mean-reversion rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
    sub->add_option("--sigma", cmpf.sigma, "OU diffusion scale")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
    add_noise(*sub, cmp.noise_sd);
    sub->add_option("--n", cmp.n, "Number of curves")->capture_default_str();
    sub->add_option("--p", cmp.p, "Number of design points")
      ->capture_default_str();
    sub->add_option("--orders", cmpf.orders, "Comma separated orders")
      ->capture_default_str();
    sub->add_option("--kernel", cmpf.kernel, "Product kernel")
      ->check(CLI::IsMember({ "uniform", "epanechnikov" }))
      ->capture_default_str();
    sub->add_option("--h-grid", cmpf.h_grid, "A:B:STEP or a,b,c")
      ->capture_default_str();
    add_reps(*sub, cmp.reps);
    add_seed(*sub, cmpf.seed);
    add_out(*sub, cmpf.out, "Report CSV");
    commands.push_back({ sub, [&](std::ostream&) {
                          cmp.targets = { OrnsteinUhlenbeck{ cmpf.theta,
                                                             cmpf.sigma },
                                          TwoTerm{} };
                          cmp.orders.clear();
                          for (const auto& s : split(cmpf.orders, ','))
                            cmp.orders.push_back(
                              static_cast<unsigned>(std::stoul(s)));
                          cmp.kernel = parse_kernel_kind(cmpf.kernel);
                          cmp.h_grid = parse_h_grid(cmpf.h_grid);
                          cmp.rng = RngSpec(cmpf.seed);
                          write_report(cmpf.out,
                                       estimator_comparison(cmp).report);
                        } });
  }

  // clt --------------------------------------------------------------------
  CltConfig clt;
  struct
  {
    ProcessFlags process;
    SmootherFlags smoother;
    std::string points = "0.25:0.75,0.5:0.9";
    std::uint64_t seed = 0;
    std::string out;
  } cltf;
  cltf.smoother.bandwidth = 0.1;
  {
    auto* sub = app.add_subcommand(
      "clt", "Pointwise variance of sqrt(n) (estimate - truth) versus theory");
    cltf.process.add(*sub);
    add_noise(*sub, clt.noise_sd);
    sub->add_option("--n", clt.n, "Number of curves")->capture_default_str();
    sub->add_option("--p", clt.p, "Number of design points")
      ->capture_default_str();
    cltf.smoother.add(*sub, true);
    sub->add_option("--points", cltf.points, "Points x:y separated by commas")
      ->capture_default_str();
    add_reps(*sub, clt.reps);
    add_seed(*sub, cltf.seed);
    add_out(*sub, cltf.out, "Report CSV");
    commands.push_back({ sub, [&](std::ostream&) {
                          clt.process = cltf.process.spec();
                          clt.smoother = cltf.smoother.config();
                          clt.points.clear();
                          for (const auto& s : split(cltf.points, ',')) {
                            const auto xy = split(s, ':');
                            if (xy.size() != 2)
                              throw std::invalid_argument(
                                "points must be x:y");
                            clt.points.push_back(
                              { to_number(xy[0]), to_number(xy[1]) });
                          }
                          clt.rng = RngSpec(cltf.seed);
                          write_report(cltf.out, clt_check(clt).report);
                        } });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kUsageError;
  }

  for (const auto& cmd : commands) {
    if (!cmd.app->parsed())
      continue;
    try {
      cmd.run(out);
      return kSuccess;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kRuntimeError;
    }
  }
  err << app.help();
  return kUsageError;
}

} // namespace covsmooth::cli
