#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace twoarm::rng {

// Counter-based random streams. Output i of a stream with key k is
// mix(k + (i+1)*GAMMA), so draws depend only on (key, counter) and streams
// derived from distinct paths of the same seed never share state. This keeps
// Monte Carlo results independent of thread scheduling: every draw index owns
// its own stream.

inline constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Hashes (seed, id0, id1, ...) into a stream key. Distinct paths give
// keys that behave as independent streams.
inline std::uint64_t derive_key(std::uint64_t seed,
                                std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix(seed + kGamma);
  for (std::uint64_t id : path) {
    h = mix(h ^ mix(id + kGamma));
  }
  return h;
}

class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * kGamma); }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the spare of each pair is cached.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Offset keeps u1 strictly inside (0, 1) so log(u1) is finite.
    const double u1 =
        (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = next_uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Uniform integer in [0, bound). Lemire multiply-shift with rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    for (;;) {
      const std::uint64_t x = next_u64();
      const unsigned __int128 m =
          static_cast<unsigned __int128>(x) * static_cast<unsigned __int128>(bound);
      const std::uint64_t lo = static_cast<std::uint64_t>(m);
      if (lo >= bound || lo >= (-bound) % bound) {
        return static_cast<std::uint64_t>(m >> 64);
      }
    }
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline Stream substream(std::uint64_t seed,
                        std::initializer_list<std::uint64_t> path) {
  return Stream(derive_key(seed, path));
}

// Fixed path tags so the stream layout is stable across the codebase.
namespace tag {
inline constexpr std::uint64_t kScenarioX = 1;
inline constexpr std::uint64_t kZDraw = 2;
inline constexpr std::uint64_t kWDraw = 3;
inline constexpr std::uint64_t kGreedyRestart = 4;
inline constexpr std::uint64_t kMixture = 5;
inline constexpr std::uint64_t kMcQuantile = 6;
}  // namespace tag

}  // namespace twoarm::rng
