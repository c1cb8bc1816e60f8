#include "covsmooth/experiments.hpp"

#include "covsmooth/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace covsmooth {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> truth_at(const TriangleGrid& evals,
                             const ProcessSpec& process)
{
  std::vector<double> out(evals.size());
  for (std::size_t i = 0; i < evals.size(); ++i)
    out[i] = kernel(process, evals[i].x, evals[i].y);
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d))
      return kInf;
    worst = std::max(worst, d);
  }
  return worst;
}

double sup_norm(const std::vector<double>& v)
{
  double worst = 0.0;
  for (double x : v)
    worst = std::max(worst, std::abs(x));
  return worst;
}

std::size_t argmin_first(std::span<const double> v)
{
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] < v[best])
      best = i;
  return best;
}

void check_h_grid(const std::vector<double>& h_grid)
{
  if (h_grid.empty())
    throw std::invalid_argument("empty bandwidth grid");
  for (double h : h_grid)
    if (!(h > 0.0 && h <= 1.0))
      throw std::invalid_argument("bandwidths must lie in (0, 1]");
}

void check_reps(std::size_t reps)
{
  if (reps < 1)
    throw std::invalid_argument("need at least one replication");
}

std::string process_name(const ProcessSpec& spec)
{
  if (std::holds_alternative<OrnsteinUhlenbeck>(spec))
    return "ou";
  if (std::holds_alternative<TwoTerm>(spec))
    return "twoterm";
  return "bm";
}

} // namespace

void ExperimentReport::append(const ExperimentReport& other)
{
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
}

std::vector<const ReportRow*> ExperimentReport::find(
  const std::string& metric) const
{
  std::vector<const ReportRow*> out;
  for (const auto& r : rows)
    if (r.metric == metric)
      out.push_back(&r);
  return out;
}

double sup_error(const CovarianceSurface& surface,
                 const std::function<double(double, double)>& truth)
{
  if (surface.has_holes()) {
    std::ostringstream msg;
    msg << "surface has " << surface.holes().size() << " hole(s) at";
    std::size_t shown = 0;
    for (std::size_t i : surface.holes()) {
      if (shown++ == 5) {
        msg << " ...";
        break;
      }
      msg << " (" << surface.evals()[i].x << ", " << surface.evals()[i].y
          << ")";
    }
    throw InvalidStateError(msg.str());
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < surface.size(); ++i) {
    const auto& e = surface.evals()[i];
    worst = std::max(worst, std::abs(surface.value(i) - truth(e.x, e.y)));
  }
  return worst;
}

Replication simulate_replication(const ProcessSpec& process,
                                 std::size_t n,
                                 const DesignGrid& grid,
                                 double noise_sd,
                                 const RngSpec& replication_rng)
{
  Eigen::MatrixXd latent =
    simulate_latent(process, n, grid, replication_rng.substream(0));
  Eigen::MatrixXd noise =
    noise_matrix(n, grid.size(), noise_sd, replication_rng.substream(1));
  SampleMatrix observed(latent + noise);
  return { std::move(latent), std::move(noise), std::move(observed) };
}

// ---------------------------------------------------------------------------

SweepResult bandwidth_sweep(const SweepConfig& config)
{
  check_h_grid(config.h_grid);
  check_reps(config.reps);
  const DesignGrid grid = make_equidistant_grid(config.p);
  const TriangleGrid evals = triangle_eval_grid(grid);
  const std::vector<double> truth = truth_at(evals, config.process);

  std::vector<Eigen::MatrixXd> z(config.reps);
  for (std::size_t r = 0; r < config.reps; ++r)
    z[r] = empirical_covariance(
             simulate_replication(config.process, config.n, grid,
                                  config.noise_sd, config.rng.substream(r))
               .observed)
             .z;

  SweepResult out;
  out.h_grid = config.h_grid;
  const std::size_t nh = config.h_grid.size();
  out.errors.resize(static_cast<Eigen::Index>(config.reps),
                    static_cast<Eigen::Index>(nh));
  for (std::size_t l = 0; l < nh; ++l) {
    SmootherConfig cfg = config.smoother;
    cfg.bandwidth = config.h_grid[l];
    const WeightField field = compute_weight_field(grid, cfg, evals);
    for (std::size_t r = 0; r < config.reps; ++r)
      out.errors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)) =
        field.has_holes() ? kInf : max_abs_diff(field.apply(z[r]), truth);
  }

  out.mean.resize(nh);
  out.std_error.resize(nh);
  const auto reps = static_cast<double>(config.reps);
  for (std::size_t l = 0; l < nh; ++l) {
    const auto col = out.errors.col(static_cast<Eigen::Index>(l));
    const double mean = col.mean();
    out.mean[l] = mean;
    if (config.reps > 1 && std::isfinite(mean)) {
      const double var = (col.array() - mean).square().sum() / (reps - 1.0);
      out.std_error[l] = std::sqrt(var / reps);
    } else {
      out.std_error[l] = std::isfinite(mean) ? 0.0 : kInf;
    }
  }
  out.best_index = argmin_first(out.mean);
  out.best_h = config.h_grid[out.best_index];

  const unsigned m = config.smoother.order.value();
  out.rep_argmin_h.resize(config.reps);
  for (std::size_t r = 0; r < config.reps; ++r) {
    std::vector<double> row(nh);
    for (std::size_t l = 0; l < nh; ++l)
      row[l] =
        out.errors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l));
    out.rep_argmin_h[r] = config.h_grid[argmin_first(row)];
  }

  auto& rep = out.report;
  for (std::size_t l = 0; l < nh; ++l)
    for (std::size_t r = 0; r < config.reps; ++r)
      rep.add({ "sweep", config.n, config.p, config.h_grid[l], m, r,
                "sup_error",
                out.errors(static_cast<Eigen::Index>(r),
                           static_cast<Eigen::Index>(l)) });
  for (std::size_t r = 0; r < config.reps; ++r)
    rep.add({ "sweep", config.n, config.p, std::nullopt, m, r, "argmin_h",
              out.rep_argmin_h[r] });
  for (std::size_t l = 0; l < nh; ++l) {
    rep.add({ "sweep", config.n, config.p, config.h_grid[l], m, std::nullopt,
              "mean_sup_error", out.mean[l] });
    rep.add({ "sweep", config.n, config.p, config.h_grid[l], m, std::nullopt,
              "se_sup_error", out.std_error[l] });
  }
  rep.add({ "sweep", config.n, config.p, out.best_h, m, std::nullopt,
            "best_h", out.best_h });
  return out;
}

// ---------------------------------------------------------------------------

double DecompositionTerms::identity_residual() const
{
  double worst = 0.0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    const double r =
      std::abs(eps2[i] + bias[i] + prc[i] + mix[i] - indep[i] - total[i]);
    if (std::isnan(r))
      return kInf;
    worst = std::max(worst, r);
  }
  return worst;
}

DecompositionTerms decompose(const Eigen::MatrixXd& latent,
                             const Eigen::MatrixXd& noise,
                             const WeightField& field,
                             const std::function<double(double, double)>& truth)
{
  const auto& grid = field.grid();
  const Eigen::Index n = latent.rows();
  const auto p = static_cast<Eigen::Index>(grid.size());
  if (n < 2 || latent.cols() != p || noise.rows() != n || noise.cols() != p)
    throw std::invalid_argument("latent and noise must both be n x p, n >= 2");
  if (field.has_holes())
    throw InvalidStateError("weight field has holes");

  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd ztz = latent.transpose() * latent;
  const Eigen::MatrixXd ete = noise.transpose() * noise;
  const Eigen::MatrixXd zte = latent.transpose() * noise;
  const Eigen::VectorXd sz = latent.colwise().sum().transpose();
  const Eigen::VectorXd se = noise.colwise().sum().transpose();

  Eigen::MatrixXd gamma(p, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index k = 0; k < p; ++k)
      gamma(j, k) = truth(grid[static_cast<std::size_t>(j)],
                          grid[static_cast<std::size_t>(k)]);

  const Eigen::MatrixXd eps2 = ete / nd;
  const Eigen::MatrixXd prc = ztz / nd - gamma;
  const Eigen::MatrixXd mix = (zte + zte.transpose()) / nd;
  const Eigen::MatrixXd indep =
    ((se * se.transpose() - ete) + (sz * sz.transpose() - ztz) +
     (sz * se.transpose() - zte) + (se * sz.transpose() - zte.transpose())) /
    (nd * (nd - 1.0));

  const SampleMatrix observed(latent + noise);
  const std::vector<double> fit =
    field.apply(empirical_covariance(observed).z);
  const std::vector<double> weight_sum =
    field.apply(Eigen::MatrixXd::Ones(p, p));
  const std::vector<double> smoothed_gamma = field.apply(gamma);

  DecompositionTerms t;
  t.eps2 = field.apply(eps2);
  t.prc = field.apply(prc);
  t.mix = field.apply(mix);
  t.indep = field.apply(indep);
  t.bias.resize(field.size());
  t.total.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& e = field.evals()[i];
    const double target = truth(e.x, e.y);
    t.bias[i] = smoothed_gamma[i] - target * weight_sum[i];
    t.total[i] = fit[i] - target;
  }
  return t;
}

DecompositionResult decomposition_study(const DecompositionConfig& config)
{
  check_reps(config.reps);
  const DesignGrid grid = make_equidistant_grid(config.p);
  const TriangleGrid evals = triangle_eval_grid(grid);
  const WeightField field = compute_weight_field(grid, config.smoother, evals);
  const auto truth = [&](double s, double t) {
    return kernel(config.process, s, t);
  };

  DecompositionResult out;
  out.sup_norms.resize(static_cast<Eigen::Index>(config.reps), 6);
  out.residuals.resize(config.reps);
  const unsigned m = config.smoother.order.value();
  const double h = config.smoother.bandwidth;
  for (std::size_t r = 0; r < config.reps; ++r) {
    const Replication data =
      simulate_replication(config.process, config.n, grid, config.noise_sd,
                           config.rng.substream(r));
    const DecompositionTerms t =
      decompose(data.latent, data.noise, field, truth);
    const double resid = t.identity_residual();
    if (!(resid <= config.identity_tolerance)) {
      std::ostringstream msg;
      msg << "error decomposition identity violated in replication " << r
          << ": residual " << resid;
      throw InternalError(msg.str());
    }
    out.residuals[r] = resid;
    const auto row = static_cast<Eigen::Index>(r);
    out.sup_norms(row, 0) = sup_norm(t.bias);
    out.sup_norms(row, 1) = sup_norm(t.eps2);
    out.sup_norms(row, 2) = sup_norm(t.mix);
    out.sup_norms(row, 3) = sup_norm(t.prc);
    out.sup_norms(row, 4) = sup_norm(t.indep);
    out.sup_norms(row, 5) = sup_norm(t.total);
  }

  auto& rep = out.report;
  for (std::size_t r = 0; r < config.reps; ++r) {
    for (int c = 0; c < 6; ++c) {
      if (c == 4 && !config.include_indep)
        continue;
      rep.add({ "decompose", config.n, config.p, h, m, r,
                DecompositionResult::columns[c],
                out.sup_norms(static_cast<Eigen::Index>(r), c) });
    }
    rep.add({ "decompose", config.n, config.p, h, m, r, "identity_residual",
              out.residuals[r] });
  }
  for (int c = 0; c < 6; ++c) {
    if (c == 4 && !config.include_indep)
      continue;
    rep.add({ "decompose", config.n, config.p, h, m, std::nullopt,
              std::string("mean_") + DecompositionResult::columns[c],
              out.sup_norms.col(c).mean() });
  }
  return out;
}

// ---------------------------------------------------------------------------

const ComparisonCurve& ComparisonResult::curve(const std::string& target,
                                               PairDomain domain,
                                               unsigned order) const
{
  for (const auto& c : curves)
    if (c.target == target && c.domain == domain && c.order == order)
      return c;
  throw NotFoundError("no comparison curve for " + target);
}

ComparisonResult estimator_comparison(const ComparisonConfig& config)
{
  check_h_grid(config.h_grid);
  check_reps(config.reps);
  const DesignGrid grid = make_equidistant_grid(config.p);
  const TriangleGrid evals = triangle_eval_grid(grid);

  ComparisonResult out;
  out.h_grid = config.h_grid;
  for (std::size_t t = 0; t < config.targets.size(); ++t) {
    const ProcessSpec& target = config.targets[t];
    const std::string name = process_name(target);
    const std::vector<double> truth = truth_at(evals, target);
    const RngSpec target_rng = config.rng.substream(t);

    std::vector<Eigen::MatrixXd> z(config.reps);
    for (std::size_t r = 0; r < config.reps; ++r)
      z[r] = empirical_covariance(
               simulate_replication(target, config.n, grid, config.noise_sd,
                                    target_rng.substream(r))
                 .observed)
               .z;

    for (unsigned m : config.orders) {
      for (PairDomain domain :
           { PairDomain::UpperTriangle, PairDomain::OffDiagonal }) {
        ComparisonCurve c;
        c.target = name;
        c.domain = domain;
        c.order = m;
        c.pairs_used = domain == PairDomain::UpperTriangle
                         ? config.p * (config.p - 1) / 2
                         : config.p * (config.p - 1);
        c.mean.resize(config.h_grid.size());
        for (std::size_t l = 0; l < config.h_grid.size(); ++l) {
          SmootherConfig cfg{ PolyOrder(m), config.h_grid[l], config.kernel,
                              domain };
          const WeightField field = compute_weight_field(grid, cfg, evals);
          double sum = 0.0;
          for (std::size_t r = 0; r < config.reps; ++r)
            sum += field.has_holes() ? kInf
                                     : max_abs_diff(field.apply(z[r]), truth);
          c.mean[l] = sum / static_cast<double>(config.reps);
          out.report.add({ "compare_" + name + "_" +
                             std::string(to_string(domain)),
                           config.n, config.p, config.h_grid[l], m,
                           std::nullopt, "mean_sup_error", c.mean[l] });
        }
        c.best_index = argmin_first(c.mean);
        c.best_mean = c.mean[c.best_index];
        out.report.add({ "compare_" + name + "_" +
                           std::string(to_string(domain)),
                         config.n, config.p, config.h_grid[c.best_index], m,
                         std::nullopt, "best_mean_sup_error", c.best_mean });
        out.curves.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

double gaussian_fourth_moment_variance(const ProcessSpec& process,
                                       double x,
                                       double y)
{
  const double gxy = kernel(process, x, y);
  return kernel(process, x, x) * kernel(process, y, y) + gxy * gxy;
}

CltResult clt_check(const CltConfig& config)
{
  check_reps(config.reps);
  if (config.points.empty())
    throw std::invalid_argument("no evaluation points");
  const DesignGrid grid = make_equidistant_grid(config.p);
  std::vector<EvalPoint> pts;
  for (auto pt : config.points) {
    if (pt.x > pt.y)
      std::swap(pt.x, pt.y);
    pts.push_back(pt);
  }
  const TriangleGrid evals(pts);
  const WeightField field = compute_weight_field(grid, config.smoother, evals);
  if (field.has_holes())
    throw InvalidStateError("evaluation point without observation pairs");

  const double root_n = std::sqrt(static_cast<double>(config.n));
  Eigen::MatrixXd scaled(static_cast<Eigen::Index>(config.reps),
                         static_cast<Eigen::Index>(pts.size()));
  for (std::size_t r = 0; r < config.reps; ++r) {
    const Replication data =
      simulate_replication(config.process, config.n, grid, config.noise_sd,
                           config.rng.substream(r));
    const auto fit = field.apply(empirical_covariance(data.observed).z);
    for (std::size_t i = 0; i < pts.size(); ++i)
      scaled(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) =
        root_n * (fit[i] - kernel(config.process, pts[i].x, pts[i].y));
  }

  CltResult out;
  const auto reps = static_cast<double>(config.reps);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto col = scaled.col(static_cast<Eigen::Index>(i));
    CltPoint cp;
    cp.point = pts[i];
    cp.mean = col.mean();
    cp.variance = config.reps > 1 ? (col.array() - cp.mean).square().sum() /
                                      (reps - 1.0)
                                  : 0.0;
    cp.mean_se = std::sqrt(cp.variance / reps);
    cp.theory = gaussian_fourth_moment_variance(config.process, pts[i].x,
                                                pts[i].y);
    cp.ratio = cp.variance / cp.theory;
    out.points.push_back(cp);

    const std::string exp = "clt";
    const double h = config.smoother.bandwidth;
    const unsigned m = config.smoother.order.value();
    std::ostringstream tag;
    tag << "@" << pts[i].x << "_" << pts[i].y;
    out.report.add({ exp, config.n, config.p, h, m, std::nullopt,
                     "mean" + tag.str(), cp.mean });
    out.report.add({ exp, config.n, config.p, h, m, std::nullopt,
                     "mean_se" + tag.str(), cp.mean_se });
    out.report.add({ exp, config.n, config.p, h, m, std::nullopt,
                     "variance" + tag.str(), cp.variance });
    out.report.add({ exp, config.n, config.p, h, m, std::nullopt,
                     "theory" + tag.str(), cp.theory });
    out.report.add({ exp, config.n, config.p, h, m, std::nullopt,
                     "ratio" + tag.str(), cp.ratio });
  }
  return out;
}

// ---------------------------------------------------------------------------

double log_log_slope(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("slope needs >= 2 matching points");
  const auto k = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("slope needs distinct x values");
  return sxy / sxx;
}

RateResult rate_table(const RateConfig& config)
{
  if (config.n_list.empty())
    throw std::invalid_argument("empty sample size list");
  RateResult out;
  std::vector<double> ns;
  std::vector<double> errs;
  for (std::size_t i = 0; i < config.n_list.size(); ++i) {
    SweepConfig sweep;
    sweep.process = config.process;
    sweep.n = config.n_list[i];
    sweep.p = config.p_rule(sweep.n);
    sweep.noise_sd = config.noise_sd;
    sweep.smoother = config.smoother;
    sweep.h_grid = config.h_grid;
    sweep.reps = config.reps;
    sweep.rng = config.rng.substream(i);

    RateEntry entry;
    entry.n = sweep.n;
    entry.p = sweep.p;
    entry.sweep = bandwidth_sweep(sweep);
    entry.best_h = entry.sweep.best_h;
    entry.mean_error = entry.sweep.mean[entry.sweep.best_index];
    ns.push_back(static_cast<double>(entry.n));
    errs.push_back(entry.mean_error);
    out.report.add({ "rates", entry.n, entry.p, entry.best_h,
                     config.smoother.order.value(), std::nullopt,
                     "oracle_mean_sup_error", entry.mean_error });
    out.entries.push_back(std::move(entry));
  }
  if (ns.size() >= 2) {
    out.slope = log_log_slope(ns, errs);
    out.report.add({ "rates", 0, 0, std::nullopt,
                     config.smoother.order.value(), std::nullopt,
                     "log_log_slope", out.slope });
  }
  return out;
}

// ---------------------------------------------------------------------------

CvStudyResult cv_study(const CvStudyConfig& config)
{
  check_h_grid(config.h_grid);
  check_reps(config.reps);
  const DesignGrid grid = make_equidistant_grid(config.p);
  const TriangleGrid evals = strict_upper_eval_grid(grid);

  std::vector<CVFoldData> data;
  data.reserve(config.reps);
  for (std::size_t r = 0; r < config.reps; ++r) {
    const RngSpec rep_rng = config.rng.substream(r);
    const Replication rep = simulate_replication(
      config.process, config.n, grid, config.noise_sd, rep_rng);
    data.push_back(prepare_folds(
      rep.observed, config.folds, rep_rng.substream(2).seed()));
  }

  // Bandwidth-major loop so that only one weight field is alive at a time.
  const std::size_t nh = config.h_grid.size();
  std::vector<std::vector<double>> scores(config.reps,
                                          std::vector<double>(nh, kInf));
  for (std::size_t l = 0; l < nh; ++l) {
    SmootherConfig cfg = config.smoother;
    cfg.bandwidth = config.h_grid[l];
    const WeightField field = compute_weight_field(grid, cfg, evals);
    for (std::size_t r = 0; r < config.reps; ++r)
      scores[r][l] = cv_score(field, data[r]);
  }

  CvStudyResult out;
  const unsigned m = config.smoother.order.value();
  for (std::size_t r = 0; r < config.reps; ++r) {
    const double chosen = config.h_grid[argmin_first(scores[r])];
    out.selected_h.push_back(chosen);
    for (std::size_t l = 0; l < nh; ++l)
      out.report.add({ "cv", config.n, config.p, config.h_grid[l], m, r,
                       "cv_score", scores[r][l] });
    out.report.add({ "cv", config.n, config.p, std::nullopt, m, r,
                     "selected_h", chosen });
  }
  std::vector<double> sorted = out.selected_h;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t k = sorted.size();
  const double median =
    k % 2 ? sorted[k / 2] : 0.5 * (sorted[k / 2 - 1] + sorted[k / 2]);
  out.report.add({ "cv", config.n, config.p, std::nullopt, m, std::nullopt,
                   "median_selected_h", median });
  return out;
}

} // namespace covsmooth
