#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace hoplab {

// SplitMix64 finalizer; avalanches a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Stable sub-seed for a named stream. Every independent random stream in the
// project (environment sides, replicas, thinning draws, ...) is keyed by
// (master seed, label[, index]) so that results are reproducible and
// independent of scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  return mix64(master ^ mix64(fnv1a64(label)));
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                 std::uint64_t index) {
  return mix64(derive_seed(master, label) ^ mix64(index + 0x632be59bd9b4e019ull));
}

// Mersenne twister wrapped with a strictly-interior (0,1) uniform map so that
// log/inverse-CDF transforms never see 0 or 1.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }

  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  // Box-Muller; no caching so the draw count per call is fixed.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  bool coin() { return (engine_() >> 63) != 0; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hoplab
