#pragma once

#include <cstdint>
#include <cmath>

namespace rsm {

// Counter-based splitmix64 stream. Each (seed, tag, index) triple addresses
// an independent stream, so any variate in a run is a pure function of the
// master seed and its logical position; no draw-order coupling between
// workers or trials.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) noexcept {
    state_ = mix(seed + 0x9e3779b97f4a7c15ull * tag);
    state_ = mix(state_ + 0xbf58476d1ce4e5b9ull * index);
  }

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on (0, 1): 53 high bits, half-open shifted to exclude 0.
  double next_unit() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform integer in [0, bound) by rejection; bound must be nonzero.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    for (;;) {
      std::uint64_t v = next_u64();
      if (v < limit) return v % bound;
    }
  }

  // Standard normal via Box-Muller; consumes two uniforms per value, second
  // value of the pair is discarded so each call is stateless w.r.t. parity.
  double next_normal() noexcept {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

private:
  static std::uint64_t mix(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

// Stream tags. Values are part of the on-disk reproducibility contract:
// changing them changes every generated dataset and trial sequence.
namespace stream {
inline constexpr std::uint64_t FACTOR_A = 1;
inline constexpr std::uint64_t FACTOR_B = 2;
inline constexpr std::uint64_t NOISE = 3;
inline constexpr std::uint64_t MASK = 4;
inline constexpr std::uint64_t TRIAL = 5;
inline constexpr std::uint64_t ALS_INIT = 6;
} // namespace stream

} // namespace rsm
