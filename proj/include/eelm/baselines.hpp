#pragma once

// Common entry point over every optimizer kind, plus the canonical baseline
// minimizers used for comparison: global-best PSO, real-coded GA, WOA and
// uniform random search. All share the MRFO contract: exactly maxIterations
// iterations, a non-increasing best-so-far history, positions clamped to the
// box, and bitwise reproducibility for a fixed seed (serial or parallel).

#include <optional>
#include <string_view>

#include "eelm/mrfo.hpp"
#include "eelm/optimizer.hpp"

namespace eelm::opt {

enum class OptimizerKind { mrfo, mrfoLevy, pso, ga, woa, randomSearch };

OptimizerKind parseOptimizerKind(std::string_view name);
std::string_view toString(OptimizerKind kind) noexcept;

struct MrfoParams {
  double somersaultFactor = 2.0;
  double levyExponentBeta = 1.5;
  std::optional<double> levyScale;
};

struct PsoParams {
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  /// Velocity limit as a fraction of the box width.
  double velocityClamp = 0.5;
};

struct GaParams {
  double crossoverRate = 0.9;
  double mutationRate = 0.1;
  /// Gaussian mutation sigma as a fraction of the box width.
  double mutationScale = 0.1;
  int tournamentSize = 3;
  double blendAlpha = 0.5;
  int elites = 1;
};

struct WoaParams {
  double spiralConstant = 1.0;
};

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::mrfoLevy;
  int populationSize = 20;
  int maxIterations = 50;
  Bounds bounds;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
  MrfoParams mrfo;
  PsoParams pso;
  GaParams ga;
  WoaParams woa;

  void validate() const;
  /// Objective evaluations spent per iteration (MRFO evaluates twice).
  int evaluationsPerIteration() const noexcept;
  MrfoConfig toMrfoConfig() const;
};

int evaluationsPerIteration(OptimizerKind kind, int populationSize, int gaElites = 1) noexcept;

/// Largest iteration count whose evaluation cost (excluding the initial
/// population) fits in `evaluations`.
int iterationsForBudget(OptimizerKind kind, int populationSize, long long evaluations,
                        int gaElites = 1) noexcept;

OptimizeResult minimizeWith(const OptimizerSpec& spec, const Objective& objective,
                            const Observer& observer = {});

OptimizeResult minimizePso(const OptimizerSpec& spec, const Objective& objective,
                           const Observer& observer = {});
OptimizeResult minimizeGa(const OptimizerSpec& spec, const Objective& objective,
                          const Observer& observer = {});
OptimizeResult minimizeWoa(const OptimizerSpec& spec, const Objective& objective,
                           const Observer& observer = {});
OptimizeResult minimizeRandomSearch(const OptimizerSpec& spec, const Objective& objective,
                                    const Observer& observer = {});

/// One GA generation: the `elites` best individuals survive unchanged and the
/// rest are offspring of tournament-selected parents (blend crossover, then
/// per-gene Gaussian mutation), drawn from stream (seed, ga, generation, slot).
PositionMatrix gaNextGeneration(const PositionMatrix& population, std::span<const double> fitness,
                                const GaParams& params, const Bounds& bounds, std::uint64_t seed,
                                int generation, Execution exec);

}  // namespace eelm::opt
