#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace recom {

/// SplitMix64 step; advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for stream `stream` of a run seeded with `seed`. Distinct streams of one
/// seed are decorrelated by two SplitMix64 rounds.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator, one instance per chain. Bounded integers use Lemire's
/// multiply-shift rejection and reals take the top 53 bits, so draws are
/// identical across standard libraries.
class Rng {
 public:
  static constexpr std::string_view kDescription =
      "mt19937_64 seeded with splitmix64(seed, stream); Lemire bounded ints; 53-bit reals";

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : engine_(stream_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Uniform real in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace recom
