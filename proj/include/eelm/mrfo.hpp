#pragma once

// Manta ray foraging optimization (chain, cyclone and somersault foraging)
// with an optional Levy-flight walk applied after every somersault.
//
// Random stream layout (all draws uniform on [0,1) unless noted), agent i at
// iteration t (1-based):
//   init        (seed, kInitStream, i):            D draws for the start position
//   foraging    (seed, kForageStream, t, i):       branch draw; cyclone only: progress draw,
//                                                  D draws for x_rand when exploring;
//                                                  then r[0..D) and, for cyclone, r1[0..D)
//   somersault  (seed, kSomersaultStream, t, i):   r2[0..D), r3[0..D)
//   Levy walk   (seed, kLevyStream, t, i):         mu, sign draws[0..D), then D Mantegna steps
// The Levy stream is disjoint from the others, so turning the walk off leaves
// every other draw untouched.

#include <optional>
#include <span>

#include "eelm/levy.hpp"
#include "eelm/optimizer.hpp"

namespace eelm::opt {

struct SwarmState {
  PositionMatrix positions;  // x_i(t), one agent per row
  Vector fitnesses;
  Vector bestPosition;
  double bestFitness = 0.0;
  int iteration = 0;  // t, 1-based inside the loop
  int maxIterations = 1;

  Index agentCount() const noexcept { return positions.rows(); }
  Index dimension() const noexcept { return positions.cols(); }
};

struct MrfoConfig {
  int populationSize = 20;
  int maxIterations = 50;
  Bounds bounds;
  double somersaultFactor = 2.0;
  bool levyEnabled = false;
  double levyExponentBeta = 1.5;
  /// Absolute step scale; unset means 1% of the mean box width.
  std::optional<double> levyScale;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;

  void validate() const;
  double resolvedLevyScale() const;
};

/// alpha = 2 r sqrt(|ln r|); 0 at r = 0.
double chainCoefficient(double r) noexcept;
/// beta = 2 exp(r1 (T - t + 1) / T) sin(2 pi r1).
double cycloneCoefficient(double r1, int iteration, int maxIterations) noexcept;

// Update kernels with explicit random draws, one per dimension.

Vector chainUpdate(const SwarmState& state, Index agent, std::span<const double> r,
                   const Bounds& bounds);
Vector cycloneUpdate(const SwarmState& state, Index agent, const Vector& reference,
                     std::span<const double> r, std::span<const double> r1, const Bounds& bounds);
Vector somersaultUpdate(const SwarmState& state, Index agent, double somersaultFactor,
                        std::span<const double> r2, std::span<const double> r3,
                        const Bounds& bounds);
/// x + mu * sign ⊙ step, clamped.
Vector levyWalkUpdate(std::span<const double> position, double mu, std::span<const double> signs,
                      std::span<const double> step, const Bounds& bounds);

// Sampling wrappers that draw the coefficients from `rng`.

Vector chainForagingStep(const SwarmState& state, Index agent, Rng& rng, const Bounds& bounds);
Vector cycloneForagingStep(const SwarmState& state, Index agent, Rng& rng, const Vector& reference,
                           const Bounds& bounds);
Vector somersaultForagingStep(const SwarmState& state, Index agent, Rng& rng,
                              double somersaultFactor, const Bounds& bounds);
Vector applyLevyWalk(std::span<const double> position, const LevyStepSampler& sampler, Rng& rng,
                     const Bounds& bounds);

/// Runs exactly config.maxIterations iterations. The optional observer sees
/// the population after the foraging phase ("forage") and after the
/// somersault/Levy phase ("somersault") of every iteration, plus "init".
OptimizeResult minimize(const Objective& objective, const MrfoConfig& config,
                        const Observer& observer = {});

}  // namespace eelm::opt
