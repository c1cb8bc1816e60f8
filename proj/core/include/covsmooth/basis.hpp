#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string_view>
#include <utility>

namespace covsmooth {

/// Order m of the local polynomial; the basis has (m+1)(m+2)/2 monomials.
class PolyOrder
{
public:
  constexpr explicit PolyOrder(unsigned m = 0) noexcept
    : m_(m)
  {
  }

  constexpr unsigned value() const noexcept { return m_; }
  constexpr std::size_t basis_length() const noexcept
  {
    return static_cast<std::size_t>(m_ + 1) * (m_ + 2) / 2;
  }

  friend constexpr auto operator<=>(PolyOrder, PolyOrder) = default;

private:
  unsigned m_;
};

/// Monomials up to total degree m in blocks of increasing degree l,
///   (1, P_1, ..., P_m),  P_l = (u1^l / l!, u1^(l-1) u2 / (l-1)!, ...,
///                                u1^(l-i) u2^i / ((l-i)! i!), ..., u2^l / l!).
/// The constant comes first, so U_m(0, 0) is the first unit vector.
Eigen::VectorXd monomial_vector(PolyOrder order, double u1, double u2);

/// Allocation-free variant; `out` must have basis_length() entries.
void monomial_vector(PolyOrder order,
                     double u1,
                     double u2,
                     Eigen::Ref<Eigen::VectorXd> out);

/// Exponents (r1, r2) of the basis entry at `index`.
std::pair<unsigned, unsigned> monomial_exponents(PolyOrder order,
                                                 std::size_t index);

enum class KernelKind
{
  Uniform,
  EpanechnikovProduct
};

/// Bivariate kernel supported on [-1, 1]^2.
///   Uniform:             1
///   EpanechnikovProduct: (3/4)^2 (1 - u1^2)(1 - u2^2)
inline double kernel_eval(KernelKind kind, double u1, double u2) noexcept
{
  if (!(u1 >= -1.0 && u1 <= 1.0 && u2 >= -1.0 && u2 <= 1.0))
    return 0.0;
  switch (kind) {
    case KernelKind::Uniform:
      return 1.0;
    case KernelKind::EpanechnikovProduct:
      return 0.5625 * (1.0 - u1 * u1) * (1.0 - u2 * u2);
  }
  return 0.0;
}

std::string_view to_string(KernelKind kind) noexcept;

/// Parses "uniform" or "epanechnikov"; throws std::invalid_argument.
KernelKind parse_kernel_kind(std::string_view name);

} // namespace covsmooth
