#include "covsmooth/weights.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace covsmooth {

std::string_view to_string(PairDomain domain) noexcept
{
  switch (domain) {
    case PairDomain::UpperTriangle:
      return "triangle";
    case PairDomain::OffDiagonal:
      return "offdiag";
  }
  return "unknown";
}

PairDomain parse_pair_domain(std::string_view name)
{
  if (name == "triangle")
    return PairDomain::UpperTriangle;
  if (name == "offdiag")
    return PairDomain::OffDiagonal;
  throw std::invalid_argument("unknown pair domain '" + std::string(name) +
                              "'");
}

void SmootherConfig::validate() const
{
  if (!(bandwidth > 0.0 && bandwidth <= 1.0))
    throw std::invalid_argument("bandwidth must lie in (0, 1]");
  if (!(min_eigen_tol > 0.0))
    throw std::invalid_argument("min_eigen_tol must be positive");
  if (order.value() > 8)
    throw std::invalid_argument("polynomial order above 8 is not supported");
}

namespace {

inline bool in_domain(PairDomain domain, std::size_t j, std::size_t k)
{
  return domain == PairDomain::UpperTriangle ? j < k : j != k;
}

// In-window pairs with positive kernel mass, their basis rows and kernel
// values at the full configured order.
struct LocalDesign
{
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  Eigen::MatrixXd basis; // N_m x pairs
  Eigen::VectorXd kernel;
};

LocalDesign collect_local_design(EvalPoint eval,
                                 const DesignGrid& grid,
                                 const SmootherConfig& cfg)
{
  const double h = cfg.bandwidth;
  const auto [j0, j1] = grid.window(eval.x, h);
  const auto [k0, k1] = grid.window(eval.y, h);

  LocalDesign d;
  const std::size_t cap = (j1 - j0) * (k1 - k0);
  d.pairs.reserve(cap);
  std::vector<double> kvals;
  std::vector<std::pair<double, double>> offsets;
  kvals.reserve(cap);
  offsets.reserve(cap);
  for (std::size_t j = j0; j < j1; ++j) {
    const double u1 = (grid[j] - eval.x) / h;
    for (std::size_t k = k0; k < k1; ++k) {
      if (!in_domain(cfg.domain, j, k))
        continue;
      const double u2 = (grid[k] - eval.y) / h;
      const double kv = kernel_eval(cfg.kernel, u1, u2);
      if (!(kv > 0.0))
        continue;
      d.pairs.emplace_back(static_cast<std::uint32_t>(j),
                           static_cast<std::uint32_t>(k));
      kvals.push_back(kv);
      offsets.emplace_back(u1, u2);
    }
  }

  const std::size_t n_basis = cfg.order.basis_length();
  d.basis.resize(static_cast<Eigen::Index>(n_basis),
                 static_cast<Eigen::Index>(d.pairs.size()));
  d.kernel.resize(static_cast<Eigen::Index>(d.pairs.size()));
  for (std::size_t q = 0; q < d.pairs.size(); ++q) {
    monomial_vector(cfg.order, offsets[q].first, offsets[q].second,
                    d.basis.col(static_cast<Eigen::Index>(q)));
    d.kernel[static_cast<Eigen::Index>(q)] = kvals[q];
  }
  return d;
}

double gram_scale(const DesignGrid& grid, double h)
{
  const double ph = static_cast<double>(grid.size()) * h;
  return 1.0 / (ph * ph);
}

/// (p h)^-2 sum U U^T K, formed from the lower triangle so that the result
/// is exactly symmetric.
Eigen::MatrixXd local_gram(const LocalDesign& d, double scale)
{
  const auto len = d.basis.rows();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(len, len);
  const Eigen::MatrixXd root =
    d.basis * d.kernel.array().sqrt().matrix().asDiagonal();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(root, scale);
  return gram.selfadjointView<Eigen::Lower>();
}

LocalWeights solve_local(EvalPoint eval,
                         const DesignGrid& grid,
                         const SmootherConfig& cfg)
{
  LocalWeights out;
  const LocalDesign d = collect_local_design(eval, grid, cfg);
  if (d.pairs.empty()) {
    out.hole = true;
    out.effective_order = 0;
    return out;
  }

  const double scale = gram_scale(grid, cfg.bandwidth);
  const Eigen::MatrixXd gram = local_gram(d, scale);

  // The basis of order m-1 is a prefix of the basis of order m, so a lower
  // order fit uses the leading block of the same Gram matrix.
  for (int m = static_cast<int>(cfg.order.value()); m >= 0; --m) {
    const auto len = static_cast<Eigen::Index>(
      PolyOrder(static_cast<unsigned>(m)).basis_length());
    const Eigen::MatrixXd b = gram.topLeftCorner(len, len);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      b, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues()[0];
    const double floor =
      cfg.min_eigen_tol * b.trace() / static_cast<double>(len);
    if (m > 0 && !(lambda_min >= floor))
      continue;
    if (!(lambda_min > 0.0)) {
      out.hole = true;
      out.min_eigenvalue = lambda_min;
      return out;
    }

    // First row of B^-1, with one step of iterative refinement.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(b);
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(len);
    e1[0] = 1.0;
    Eigen::VectorXd v = ldlt.solve(e1);
    v += ldlt.solve(e1 - b * v);

    const Eigen::VectorXd w =
      scale * ((v.transpose() * d.basis.topRows(len)).transpose().array() *
               d.kernel.array())
                .matrix();

    out.pairs.resize(d.pairs.size());
    for (std::size_t q = 0; q < d.pairs.size(); ++q)
      out.pairs[q] = { d.pairs[q].first, d.pairs[q].second,
                       w[static_cast<Eigen::Index>(q)] };
    out.min_eigenvalue = lambda_min;
    out.effective_order = static_cast<unsigned>(m);
    return out;
  }
  out.hole = true;
  return out;
}

} // namespace

WeightField::WeightField(DesignGrid grid,
                         SmootherConfig config,
                         TriangleGrid evals,
                         std::vector<LocalWeights> local)
  : grid_(std::move(grid))
  , config_(config)
  , evals_(std::move(evals))
  , local_(std::move(local))
{
  if (local_.size() != evals_.size())
    throw std::invalid_argument("weight field size mismatch");
  hole_count_ = static_cast<std::size_t>(std::count_if(
    local_.begin(), local_.end(), [](const auto& l) { return l.hole; }));
}

std::vector<std::size_t> WeightField::holes() const
{
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < local_.size(); ++i)
    if (local_[i].hole)
      out.push_back(i);
  return out;
}

double WeightField::apply_at(std::size_t i, const Eigen::MatrixXd& z) const
{
  const auto& l = local_[i];
  if (l.hole)
    return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  for (const auto& pw : l.pairs)
    acc += pw.w * z(pw.j, pw.k);
  return acc;
}

std::vector<double> WeightField::apply(const Eigen::MatrixXd& z) const
{
  const auto p = static_cast<Eigen::Index>(grid_.size());
  if (z.rows() != p || z.cols() != p)
    throw std::invalid_argument("covariance matrix does not match the grid");
  std::vector<double> out(local_.size());
  const auto count = static_cast<std::ptrdiff_t>(local_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
      apply_at(static_cast<std::size_t>(i), z);
  return out;
}

Eigen::MatrixXd build_gram(EvalPoint eval,
                           const DesignGrid& grid,
                           const SmootherConfig& config)
{
  config.validate();
  const auto len = static_cast<Eigen::Index>(config.order.basis_length());
  const LocalDesign d = collect_local_design(eval, grid, config);
  if (d.pairs.empty())
    return Eigen::MatrixXd::Zero(len, len);
  return local_gram(d, gram_scale(grid, config.bandwidth));
}

WeightField compute_weight_field(const DesignGrid& grid,
                                 const SmootherConfig& config,
                                 const TriangleGrid& evals)
{
  config.validate();
  std::vector<LocalWeights> local(evals.size());
  const auto count = static_cast<std::ptrdiff_t>(evals.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < count; ++i)
    local[static_cast<std::size_t>(i)] =
      solve_local(evals[static_cast<std::size_t>(i)], grid, config);
  return WeightField(grid, config, evals, std::move(local));
}

WeightAxiomReport verify_weight_axioms(const WeightField& field)
{
  WeightAxiomReport report;
  const auto& grid = field.grid();
  const auto& cfg = field.config();
  const double h = cfg.bandwidth;
  const double ph = static_cast<double>(grid.size()) * h;
  const double ph2 = ph * ph;

  for (std::size_t i = 0; i < field.size(); ++i) {
    const auto& l = field.at(i);
    if (l.hole) {
      ++report.holes;
      continue;
    }
    const EvalPoint e = field.evals()[i];
    const PolyOrder eff(l.effective_order);
    for (std::size_t b = 0; b < eff.basis_length(); ++b) {
      const auto [r1, r2] = monomial_exponents(eff, b);
      double moment = 0.0;
      for (const auto& pw : l.pairs)
        moment += pw.w * std::pow(grid[pw.j] - e.x, r1) *
                  std::pow(grid[pw.k] - e.y, r2);
      const double target = (r1 + r2 == 0) ? 1.0 : 0.0;
      const double resid =
        std::abs(moment - target) / std::pow(h, static_cast<int>(r1 + r2));
      report.moment_residual = std::max(report.moment_residual, resid);
    }
    for (const auto& pw : l.pairs) {
      const double dist = std::max(std::abs(grid[pw.j] - e.x),
                                   std::abs(grid[pw.k] - e.y));
      if (dist > h || !in_domain(cfg.domain, pw.j, pw.k))
        report.support_residual = std::max(report.support_residual, std::abs(pw.w));
      report.magnitude_constant = std::max(report.magnitude_constant, std::abs(pw.w) * ph2);
    }
  }

  // Lipschitz constant over consecutive evaluation points. Pair lists are
  // sorted by (j, k), so a merge gives the difference over the union.
  for (std::size_t i = 0; i + 1 < field.size(); ++i) {
    const auto& a = field.at(i);
    const auto& b = field.at(i + 1);
    if (a.hole || b.hole)
      continue;
    const EvalPoint ea = field.evals()[i];
    const EvalPoint eb = field.evals()[i + 1];
    const double shift = std::max(std::abs(ea.x - eb.x), std::abs(ea.y - eb.y));
    if (!(shift > 0.0))
      continue;
    double max_diff = 0.0;
    std::size_t ia = 0;
    std::size_t ib = 0;
    auto key = [](const PairWeight& pw) {
      return (static_cast<std::uint64_t>(pw.j) << 32) | pw.k;
    };
    while (ia < a.pairs.size() || ib < b.pairs.size()) {
      double diff;
      if (ib == b.pairs.size() ||
          (ia < a.pairs.size() && key(a.pairs[ia]) < key(b.pairs[ib]))) {
        diff = std::abs(a.pairs[ia++].w);
      } else if (ia == a.pairs.size() || key(b.pairs[ib]) < key(a.pairs[ia])) {
        diff = std::abs(b.pairs[ib++].w);
      } else {
        diff = std::abs(a.pairs[ia++].w - b.pairs[ib++].w);
      }
      max_diff = std::max(max_diff, diff);
    }
    const double rel = std::min(shift / h, 1.0);
    report.lipschitz_constant = std::max(report.lipschitz_constant, max_diff * ph2 / rel);
  }
  return report;
}

namespace {

template<class T>
void append_bytes(std::string& key, const T& value)
{
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  key.append(buf, sizeof(T));
}

std::string cache_key(const DesignGrid& grid,
                      const SmootherConfig& cfg,
                      const TriangleGrid& evals)
{
  std::string key;
  key.reserve(64 + 8 * grid.size() + 16 * evals.size());
  append_bytes(key, cfg.order.value());
  append_bytes(key, cfg.bandwidth);
  append_bytes(key, static_cast<int>(cfg.kernel));
  append_bytes(key, static_cast<int>(cfg.domain));
  append_bytes(key, cfg.min_eigen_tol);
  append_bytes(key, grid.size());
  for (double x : grid.points())
    append_bytes(key, x);
  append_bytes(key, evals.size());
  for (const auto& e : evals) {
    append_bytes(key, e.x);
    append_bytes(key, e.y);
  }
  return key;
}

} // namespace

std::shared_ptr<const WeightField> WeightCache::get(
  const DesignGrid& grid,
  const SmootherConfig& config,
  const TriangleGrid& evals)
{
  const std::string key = cache_key(grid, config, evals);
  {
    std::lock_guard lock(mutex_);
    if (auto it = fields_.find(key); it != fields_.end())
      return it->second;
  }
  auto field = std::make_shared<const WeightField>(
    compute_weight_field(grid, config, evals));
  std::lock_guard lock(mutex_);
  return fields_.try_emplace(key, std::move(field)).first->second;
}

std::size_t WeightCache::size() const
{
  std::lock_guard lock(mutex_);
  return fields_.size();
}

void WeightCache::clear()
{
  std::lock_guard lock(mutex_);
  fields_.clear();
}

} // namespace covsmooth
