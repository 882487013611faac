#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace exctop::rng {

/// One step of the splitmix64 sequence; mutates the state and returns the
/// next output. Used for seeding and for deriving per-replicate streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Deterministic stream derivation: hash (seed, stream) into a fresh 64-bit
/// seed. Distinct streams from the same base seed are statistically
/// independent for our purposes. No wall-clock input anywhere.
inline std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (stream + 0x632be59bd9b4e019ull));
  std::uint64_t out = splitmix64_next(s);
  out ^= splitmix64_next(s);
  return out;
}

/// xoshiro256++ (Blackman/Vigna), seeded via splitmix64 as recommended.
/// Chosen over std:: engines because its output stream is fully specified,
/// so runs are reproducible across standard libraries and platforms.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0,1) with 53 random mantissa bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller. std::normal_distribution is
  /// implementation-defined, which would break bit-level reproducibility.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = 1.0 - uniform01();  // (0,1], keeps log() finite
    const double v = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace exctop::rng
