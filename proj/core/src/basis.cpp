#include "covsmooth/basis.hpp"

#include <stdexcept>
#include <string>

namespace covsmooth {

void monomial_vector(PolyOrder order,
                     double u1,
                     double u2,
                     Eigen::Ref<Eigen::VectorXd> out)
{
  const unsigned m = order.value();
  out[0] = 1.0;
  std::size_t idx = 1;
  // Running values of u^a / a! for a = 0..m.
  double pow1[32];
  double pow2[32];
  if (m >= 32)
    throw std::invalid_argument("polynomial order too large");
  pow1[0] = pow2[0] = 1.0;
  for (unsigned a = 1; a <= m; ++a) {
    pow1[a] = pow1[a - 1] * u1 / static_cast<double>(a);
    pow2[a] = pow2[a - 1] * u2 / static_cast<double>(a);
  }
  for (unsigned l = 1; l <= m; ++l)
    for (unsigned i = 0; i <= l; ++i)
      out[idx++] = pow1[l - i] * pow2[i];
}

Eigen::VectorXd monomial_vector(PolyOrder order, double u1, double u2)
{
  Eigen::VectorXd out(order.basis_length());
  monomial_vector(order, u1, u2, out);
  return out;
}

std::pair<unsigned, unsigned> monomial_exponents(PolyOrder order,
                                                 std::size_t index)
{
  if (index >= order.basis_length())
    throw std::out_of_range("basis index out of range");
  unsigned l = 0;
  std::size_t start = 0;
  while (start + l + 1 <= index) {
    start += l + 1;
    ++l;
  }
  const auto i = static_cast<unsigned>(index - start);
  return { l - i, i };
}

std::string_view to_string(KernelKind kind) noexcept
{
  switch (kind) {
    case KernelKind::Uniform:
      return "uniform";
    case KernelKind::EpanechnikovProduct:
      return "epanechnikov";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name)
{
  if (name == "uniform")
    return KernelKind::Uniform;
  if (name == "epanechnikov")
    return KernelKind::EpanechnikovProduct;
  throw std::invalid_argument("unknown kernel '" + std::string(name) + "'");
}

} // namespace covsmooth
