// Deterministic random source: one seed + one call order => bitwise identical output.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rkl {

// splitmix64, used to derive independent child seeds from a parent value.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Wraps mt19937_64 with a fixed mapping to uniforms/normals/integers so that
// every consumer draws the same values for the same seed, independent of the
// standard library's unspecified distribution implementations.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed), drawCount_(0) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t drawCount() const { return drawCount_; }

  // Raw 64-bit word.
  std::uint64_t bits() {
    ++drawCount_;
    return engine_();
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via the Box-Muller cosine branch; always consumes exactly
  // two uniforms (no caching) so call counts stay predictable.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    // log(1 - u1) is finite because u1 < 1.
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Uniform integer in [0, bound) via 128-bit multiply-shift (tiny, benign bias).
  std::uint64_t integer(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits()) * static_cast<unsigned __int128>(bound)) >> 64);
  }

  // Sequential fork: consumes one word and seeds an independent stream from it.
  // Two consecutive child() calls give unrelated streams.
  RandomSource child() { return RandomSource(splitmix64(bits())); }

  // Indexed fork keyed on the construction seed only: substream(k) is the same
  // whatever has been drawn, so per-index work can run in any order.
  RandomSource substream(std::uint64_t index) const {
    return RandomSource(splitmix64(seed_ + 0x9E3779B97F4A7C15ULL * (index + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t drawCount_;
};

}  // namespace rkl
