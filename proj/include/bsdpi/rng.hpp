#ifndef BSDPI_RNG_HPP
#define BSDPI_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace bsdpi {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based 64-bit generator.
///
/// Output n (n = 0, 1, ...) of the stream keyed by `seed` is
///   mix64(seed + (n + 1) * 0x9E3779B97F4A7C15)
/// which is the SplitMix64 sequence; any language can reproduce it.
/// Uniform doubles take the top 53 bits: ((x >> 11) + 0.5) * 2^-53, so they
/// lie strictly inside (0, 1). Gaussians use Box-Muller on two consecutive
/// uniforms (u1, u2): r = sqrt(-2 ln u1), (r cos 2πu2, r sin 2πu2).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept
  {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  double uniform() noexcept
  {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Integer in [lo, hi].
  int uniform_int(int lo, int hi) noexcept
  {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>((*this)() % span);
  }

  /// Standard complex Gaussian: real and imaginary parts each N(0, 1/2).
  std::complex<double> complex_gaussian() noexcept
  {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phase = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phase) * std::numbers::sqrt2 / 2.0, r * std::sin(phase) * std::numbers::sqrt2 / 2.0};
  }

  std::uint64_t seed() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Seed for sub-stream `index` of a campaign keyed by `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
  return mix64(seed ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

} // namespace bsdpi

#endif // BSDPI_RNG_HPP
