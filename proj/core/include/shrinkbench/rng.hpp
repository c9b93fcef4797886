#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace shrinkbench {

// The one PRNG used wherever reproducibility matters (CV fold shuffles,
// simulated annealing, bootstrap sampling, synthetic data). SplitMix64
// (Steele, Lea & Flood 2014): 64-bit state, one finalizer per draw, identical
// output on every platform. Consumption conventions, relied on by replay
// tests and by independent reimplementations:
//   - uniform u64:       next()
//   - double in [0,1):   top 53 bits of next(), scaled by 2^-53
//   - bounded integer:   next() % bound
//   - shuffle:           Fisher-Yates from the last element down,
//                        j = next() % (i + 1), swap(v[i], v[j])
//   - gaussian:          Box-Muller on two uniform draws; the sine branch is
//                        cached and returned by the following call
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t next_below(std::uint64_t bound) { return next() % bound; }

  // Standard normal deviate via Box-Muller.
  double next_gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = next_double();
    const double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;  // ln(0) guard
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// SplitMix64 finalizer alone (no state increment); building block for seed
// derivation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// FNV-1a 64-bit string hash; used to fold identifiers into derived seeds.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

// Deterministic seed derivation: fold each component into the running hash
// with one mix64 round. Used to give every (method, fraction) benchmark cell,
// every CV shuffle and every bootstrap tree its own independent stream.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a) {
  return mix64(mix64(base + 0x9E3779B97F4A7C15ULL) ^ a);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(derive_seed(base, a) ^ b);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return derive_seed(base, fnv1a64(tag));
}

// In-place Fisher-Yates shuffle with the convention documented above.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace shrinkbench
