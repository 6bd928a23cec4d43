#pragma once
// Deterministic randomness. One master seed fans out into named sub-streams;
// every distribution is sampled by explicit code so that a (config, seed)
// pair reproduces identical bytes on any platform.

#include "smafc/core.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace smafc {

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}
  RngStream(std::uint64_t master, std::string_view stream_name)
      : gen_(mix_seed(master, fnv1a64(stream_name))) {}

  std::uint64_t raw() { return gen_(); }

  // uniform on [0, 1) with 53 random bits
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal(double mean = 0.0, double sigma = 1.0) {
    // Box-Muller, two fresh uniforms per call
    double u1 = 1.0 - uniform(); // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Exact Poisson sampling via multiplicative rejection; the rate is split
  // into chunks small enough that exp(-chunk) stays in normal double range.
  std::uint64_t poisson(double lambda) {
    if (!(lambda >= 0.0)) throw ModelError("poisson: rate must be non-negative");
    std::uint64_t total = 0;
    while (lambda > 0.0) {
      double chunk = std::min(lambda, 500.0);
      double limit = std::exp(-chunk);
      std::uint64_t k = 0;
      double p = 1.0;
      do {
        ++k;
        p *= uniform();
      } while (p > limit);
      total += k - 1;
      lambda -= chunk;
    }
    return total;
  }

  int uniform_int(int n) { // 0 .. n-1, small n only
    if (n <= 0) throw ModelError("uniform_int: n must be positive");
    return static_cast<int>(gen_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 gen_;
};

} // namespace smafc
