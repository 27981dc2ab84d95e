#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace driftbandit {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t splitmix_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream identifiers. Each trial owns one generator per stream so that
/// learner-side randomness never perturbs the environment's noise draws.
enum class Stream : std::uint64_t {
  kArms = 1,
  kNoise = 2,
  kMeta = 3,
  kPath = 4,
  kInstance = 5,
  kTest = 99,
};

/// Counter-mode SplitMix64: the i-th output is mix(key + (i+1)·golden).
/// The key is derived from (seed, stream) so streams are independent and
/// results are identical on every platform.
class Rng {
 public:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix_mix(splitmix_mix(seed) ^ (stream * kGolden + 0x632be59bd9b4e019ULL))) {}
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64() {
    ++counter_;
    return splitmix_mix(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Uses rejection to avoid modulo bias.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace driftbandit
