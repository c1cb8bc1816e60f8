#pragma once

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include <cstdint>
#include <random>

namespace covsmooth {

/// splitmix64 finalizer; a bijection on 64-bit integers.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of a reproducible random stream. Substreams are derived purely from
/// (seed, index):
///   child = mix64(seed + 0x9E3779B97F4A7C15 * (index + 1))
/// so distinct indices of one parent map to distinct child seeds and the
/// result does not depend on the order in which streams are created.
class RngSpec
{
public:
  constexpr explicit RngSpec(std::uint64_t seed = 0) noexcept
    : seed_(seed)
  {
  }

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  constexpr RngSpec substream(std::uint64_t index) const noexcept
  {
    return RngSpec(mix64(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

  /// Engine positioned at the start of this stream. std::mt19937_64 is
  /// fully specified by the standard, so the bit stream is portable.
  std::mt19937_64 engine() const { return std::mt19937_64(seed_); }

  friend constexpr bool operator==(RngSpec, RngSpec) = default;

private:
  std::uint64_t seed_;
};

/// Standard normal draws with a portable algorithm (boost.random), so that
/// simulated data are identical across standard libraries.
class NormalSource
{
public:
  explicit NormalSource(const RngSpec& spec)
    : engine_(spec.engine())
  {
  }

  double operator()() { return normal_(engine_); }

  /// Uniform integer in [0, bound].
  std::uint64_t uniform_index(std::uint64_t bound)
  {
    boost::random::uniform_int_distribution<std::uint64_t> dist(0, bound);
    return dist(engine_);
  }

private:
  std::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_{ 0.0, 1.0 };
};

} // namespace covsmooth
