#pragma once

// Reference implementations that share no code with the library: they are
// used to check the library's answers, not to produce them.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

/// Closed-form OU kernel sigma^2 / (2 theta) (e^{-theta|t-s|} - e^{-theta(s+t)}).
inline double ou(double s, double t, double theta = 3.0, double sigma = 2.0)
{
  return sigma * sigma / (2.0 * theta) *
         (std::exp(-theta * std::fabs(t - s)) - std::exp(-theta * (s + t)));
}

inline double two_term(double x, double y)
{
  const double pi = 3.14159265358979323846;
  return 4.0 / 9.0 * std::sin(pi * x) * std::sin(pi * y) +
         8.0 / 9.0 * std::cos(0.8 * pi * x) * std::cos(0.8 * pi * y);
}

/// Textbook two-pass sample covariance of columns j and k.
inline double sample_cov(const Eigen::MatrixXd& y, Eigen::Index j, Eigen::Index k)
{
  const Eigen::Index n = y.rows();
  double mj = 0.0, mk = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    mj += y(i, j);
    mk += y(i, k);
  }
  mj /= static_cast<double>(n);
  mk /= static_cast<double>(n);
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    s += (y(i, j) - mj) * (y(i, k) - mk);
  return s / static_cast<double>(n - 1);
}

/// Dense weighted least squares of the local polynomial fit at (x, y):
///   minimize sum_{pairs} (z_jk - sum_a theta_a d1^r1 d2^r2)^2 K(d1/h, d2/h)
/// over plain (unnormalized) monomials of total degree <= m, solved through
/// an explicit pseudoinverse of sqrt(K) X. The intercept is linear in z; the
/// returned map holds its coefficient for each pair (j, k).
inline std::map<std::pair<int, int>, double> dense_local_weights(
  const std::vector<double>& grid,
  double x,
  double y,
  double h,
  int m,
  bool epanechnikov,
  bool off_diagonal)
{
  std::vector<std::pair<int, int>> pairs;
  std::vector<double> kw;
  const int p = static_cast<int>(grid.size());
  for (int j = 0; j < p; ++j) {
    for (int k = 0; k < p; ++k) {
      if (off_diagonal ? j == k : j >= k)
        continue;
      const double u1 = (grid[j] - x) / h;
      const double u2 = (grid[k] - y) / h;
      if (std::fabs(u1) > 1.0 || std::fabs(u2) > 1.0)
        continue;
      const double kv =
        epanechnikov ? 0.5625 * (1 - u1 * u1) * (1 - u2 * u2) : 1.0;
      if (kv <= 0.0)
        continue;
      pairs.emplace_back(j, k);
      kw.push_back(kv);
    }
  }
  std::vector<std::pair<int, int>> exps;
  for (int deg = 0; deg <= m; ++deg)
    for (int b = 0; b <= deg; ++b)
      exps.emplace_back(deg - b, b);

  const auto rows = static_cast<Eigen::Index>(pairs.size());
  const auto cols = static_cast<Eigen::Index>(exps.size());
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double d1 = grid[pairs[r].first] - x;
    const double d2 = grid[pairs[r].second] - y;
    const double sw = std::sqrt(kw[r]);
    for (Eigen::Index c = 0; c < cols; ++c)
      a(r, c) = sw * std::pow(d1, exps[c].first) * std::pow(d2, exps[c].second);
  }
  const Eigen::MatrixXd pinv =
    a.completeOrthogonalDecomposition().pseudoInverse();
  std::map<std::pair<int, int>, double> out;
  for (Eigen::Index r = 0; r < rows; ++r)
    out[pairs[r]] = pinv(0, r) * std::sqrt(kw[r]);
  return out;
}

} // namespace oracle
