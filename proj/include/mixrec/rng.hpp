#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mixrec {

// Self-contained seedable generator (xoshiro256++ seeded through splitmix64).
// All sampling code in the project goes through this class so that results
// are reproducible within one build regardless of the standard library.
//
// Sub-streams: derive_stream(seed, tag) gives an independent generator per
// purpose (images vs. selections vs. Monte Carlo), so e.g. growing the number
// of samples never perturbs the image matrix drawn from the same master seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
    has_cached_normal_ = false;
    cached_normal_ = 0.0;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double standard_normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    double u1;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
  }

  // Sorted k-subset of {0, ..., n-1} without replacement (Floyd's method).
  std::vector<int> sample_subset(int n, int k) {
    if (k < 0 || n < 0 || k > n)
      throw std::invalid_argument("Rng::sample_subset: need 0 <= k <= n");
    std::vector<int> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    for (int j = n - k; j < n; ++j) {
      const int t = static_cast<int>(below(static_cast<std::uint64_t>(j) + 1));
      bool present = false;
      for (int v : chosen) {
        if (v == t) {
          present = true;
          break;
        }
      }
      chosen.push_back(present ? j : t);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
  double cached_normal_;
  bool has_cached_normal_;
};

enum class Stream : std::uint64_t {
  images = 0x1f3a5c7e90b2d4f6ULL,
  selections = 0x2b4d6f8a1c3e5070ULL,
  monte_carlo = 0x3c5e70921b4d6f81ULL,
  graphs = 0x4d6f80a32c5e7192ULL,
  misc = 0x5e7091b43d6f82a3ULL,
};

inline Rng derive_stream(std::uint64_t master_seed, Stream tag) {
  return Rng(master_seed ^ static_cast<std::uint64_t>(tag));
}

}  // namespace mixrec
