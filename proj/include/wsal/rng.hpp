#pragma once

#include <cstdint>

namespace wsal::rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// SplitMix64 generator. Label draws dominate long runs, and this is several
/// times cheaper per draw than mt19937_64.
class Engine {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Engine(std::uint64_t seed = 0) : state_(seed) {}

  constexpr void seed(std::uint64_t seed) { state_ = seed; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  constexpr result_type operator()() {
    const std::uint64_t z = state_;
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(z);
  }

  friend constexpr bool operator==(const Engine&, const Engine&) = default;

 private:
  std::uint64_t state_;
};

/// Subroutines of a trial. Each one reads its own streams, so skipping a
/// subroutine never shifts the randomness seen by the others.
enum class Phase : std::uint32_t {
  initial = 1,
  bias = 2,
  difference = 3,
  adaptive = 4,
  measure = 5,
  diagnostics = 6,
  estimate = 7,
  free = 8,
};

/// Independent streams handed out by a World for one StreamKey.
enum class Channel : std::uint32_t { sampler = 1, label = 2, coin = 3, shadow = 4 };

struct StreamKey {
  std::uint64_t seed = 0;
  int epoch = 0;
  Phase phase = Phase::free;
  std::uint64_t round = 0;
};

constexpr std::uint64_t derive(const StreamKey& key, Channel channel) {
  std::uint64_t h = mix(key.seed);
  h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(key.epoch)));
  h = mix(h ^ (static_cast<std::uint64_t>(key.phase) << 32));
  h = mix(h ^ key.round);
  return mix(h ^ (static_cast<std::uint64_t>(channel) << 48));
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Engine& e) { return static_cast<double>(e() >> 11) * 0x1.0p-53; }

}  // namespace wsal::rng
