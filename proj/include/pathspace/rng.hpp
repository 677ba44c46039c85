#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "pathspace/linalg.hpp"

namespace pathspace {

// Deterministic per-trajectory random streams.
//
// Every Monte Carlo trajectory draws from its own stream, derived purely from
// (master seed, experiment id, trajectory index). Results are therefore
// bit-for-bit reproducible at any thread count, and paired designs (common
// random numbers across the two sides of an identity, or across restarted
// ensembles for finite differences) fall out of reusing the lane ids.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return h;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static RngStream for_lane(std::uint64_t master_seed, std::string_view experiment,
                            std::uint64_t lane) {
    std::uint64_t s = mix(master_seed);
    s = mix(s ^ fnv1a(experiment));
    s = mix(s ^ (0x632be59bd9b4e019ull * (lane + 1)));
    return RngStream(s);
  }

  // SplitMix64. Passes BigCrush; one multiply-xor chain per draw.
  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1].  The +1 keeps log() in Box-Muller finite.
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(int n, double sd = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = sd * normal();
    return v;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace pathspace
