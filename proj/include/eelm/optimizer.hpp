#pragma once

// Shared pieces of the population-based minimizers: objective type, box
// bounds, result record, population evaluation and best-so-far reduction.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "eelm/rng.hpp"
#include "eelm/types.hpp"

namespace eelm::opt {

/// Must be safe to call concurrently from several threads.
using Objective = std::function<double(std::span<const double>)>;

/// One agent per row.
using PositionMatrix = RowMatrix;

struct Bounds {
  Vector lower;
  Vector upper;

  static Bounds uniform(Index dimension, double lo, double hi);

  Index dimension() const noexcept { return lower.size(); }
  Vector width() const { return upper - lower; }
  void validate() const;
  void clamp(std::span<double> x) const noexcept;
  bool contains(std::span<const double> x) const noexcept;
  /// x_l + rand * (x_u - x_l), one uniform draw per dimension.
  Vector sample(Rng& rng) const;
};

struct OptimizeResult {
  Vector bestPosition;
  double bestFitness = 0.0;
  double initialBestFitness = 0.0;
  /// Best-so-far fitness after each iteration; length equals maxIterations.
  std::vector<double> history;
  std::uint64_t evaluations = 0;
};

/// Handed to an observer after every position-update phase.
struct PhaseSnapshot {
  int iteration;
  std::string_view phase;
  const PositionMatrix& positions;
};
using Observer = std::function<void(const PhaseSnapshot&)>;

/// Stream tags; each phase of each optimizer draws from its own family.
enum StreamTag : std::uint64_t {
  kInitStream = 1,
  kForageStream,
  kSomersaultStream,
  kLevyStream,
  kPsoStream,
  kGaStream,
  kWoaStream,
  kRandomSearchStream,
};

/// Non-finite objective values become +infinity.
double sanitizeFitness(double value) noexcept;

/// fitness[i] = sanitizeFitness(objective(row i)).
void evaluatePopulation(const Objective& objective, const PositionMatrix& positions,
                        std::span<double> fitness, Execution exec);

/// Strict less-than update in index order: the first achiever is retained.
/// Returns true when the best changed.
bool updateBest(const PositionMatrix& positions, std::span<const double> fitness,
                Vector& bestPosition, double& bestFitness);

inline std::span<const double> rowSpan(const PositionMatrix& m, Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}
inline std::span<double> rowSpan(PositionMatrix& m, Index row) {
  return {m.data() + row * m.cols(), static_cast<std::size_t>(m.cols())};
}
inline std::span<const double> asSpan(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> asSpan(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Uniform initial population, agent i drawn from stream (seed, init, i).
PositionMatrix initialPopulation(const Bounds& bounds, int populationSize, std::uint64_t seed);

}  // namespace eelm::opt
