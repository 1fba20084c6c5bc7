#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace eelm {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed and a key path,
/// e.g. (seed, {phase, iteration, agent}).
std::uint64_t streamSeed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept;

/// Seeded generator. Every parallel work item owns its own stream, so the
/// numbers an item sees never depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    return Rng(streamSeed(seed, keys));
  }

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal.
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace eelm
