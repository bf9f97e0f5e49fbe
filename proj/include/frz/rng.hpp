#pragma once

#include <cmath>
#include <cstdint>

namespace frz {

// 64-bit finalizer from splitmix64 (Steele, Lea, Flood 2014); also used as
// the seed-mixing function for replica substreams.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 in counter form: output i of the stream with the given seed.
// Matches the sequential generator (state += golden; return mix(state)),
// so output(seed, 0) is the first value of the published test vectors.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i) {
  return mix64(seed + (i + 1) * kGolden);
}

// Sequential splitmix64.
class rng {
 public:
  explicit rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix64(state_);
  }

  // Uniform on [0, 1) with 53-bit resolution; never returns 1.
  double next_u01() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

  // Uniform on (0, 1]; positive, so comparisons against p == 0 never accept.
  double next_u01_open0() {
    std::uint64_t k = next_u64() >> 11;
    return static_cast<double>(2 * k + 1) * 0x1p-54;
  }

  // Uniform integer in [0, n) by the Lemire multiply-shift reduction.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Exponential with the given rate; log1p keeps the draw finite.
  double next_exponential(double rate) {
    return -std::log1p(-next_u01()) / rate;
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Substream seed for a replica: finalizer applied to (seed XOR replica).
inline std::uint64_t replica_seed(std::uint64_t seed, std::uint64_t replica) {
  return mix64(seed ^ replica);
}

}  // namespace frz
