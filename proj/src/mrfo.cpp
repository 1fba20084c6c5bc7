#include "eelm/mrfo.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <fmt/format.h>

namespace eelm::opt {

void MrfoConfig::validate() const {
  if (populationSize < 1) throw ConfigError("population size must be >= 1");
  if (maxIterations < 0) throw ConfigError("iteration count must be >= 0");
  bounds.validate();
  if (!(somersaultFactor > 0.0)) throw ConfigError("somersault factor must be > 0");
  if (!(levyExponentBeta > 0.0 && levyExponentBeta <= 2.0))
    throw ConfigError(fmt::format("Levy exponent must lie in (0, 2], got {}", levyExponentBeta));
  if (levyScale && !(*levyScale > 0.0)) throw ConfigError("Levy scale must be > 0");
}

double MrfoConfig::resolvedLevyScale() const {
  return levyScale ? *levyScale : 0.01 * bounds.width().mean();
}

double chainCoefficient(double r) noexcept {
  if (r <= 0.0) return 0.0;
  return 2.0 * r * std::sqrt(std::abs(std::log(r)));
}

double cycloneCoefficient(double r1, int iteration, int maxIterations) noexcept {
  const double progress = static_cast<double>(maxIterations - iteration + 1) / maxIterations;
  return 2.0 * std::exp(r1 * progress) * std::sin(2.0 * std::numbers::pi * r1);
}

namespace {

void checkAgent(const SwarmState& state, Index agent) {
  if (agent < 0 || agent >= state.agentCount())
    throw std::out_of_range(fmt::format("agent index {} outside [0, {})", agent, state.agentCount()));
}

void checkDraws(const SwarmState& state, std::span<const double> draws) {
  if (static_cast<Index>(draws.size()) != state.dimension())
    throw ShapeError(fmt::format("expected {} random draws, got {}", state.dimension(), draws.size()));
}

std::vector<double> uniforms(Rng& rng, Index n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = rng.uniform();
  return out;
}

}  // namespace

Vector chainUpdate(const SwarmState& state, Index agent, std::span<const double> r,
                   const Bounds& bounds) {
  checkAgent(state, agent);
  checkDraws(state, r);
  const Index dim = state.dimension();
  Vector next(dim);
  for (Index d = 0; d < dim; ++d) {
    const double rd = r[static_cast<std::size_t>(d)];
    const double alpha = chainCoefficient(rd);
    const double xi = state.positions(agent, d);
    const double best = state.bestPosition(d);
    if (agent == 0) {
      next(d) = xi + rd * (best - xi) + alpha * (best - xi);
    } else {
      const double prev = state.positions(agent - 1, d);
      next(d) = prev + rd * (prev - xi) + alpha * (best - xi);
    }
  }
  bounds.clamp(asSpan(next));
  return next;
}

Vector cycloneUpdate(const SwarmState& state, Index agent, const Vector& reference,
                     std::span<const double> r, std::span<const double> r1, const Bounds& bounds) {
  checkAgent(state, agent);
  checkDraws(state, r);
  checkDraws(state, r1);
  const Index dim = state.dimension();
  Vector next(dim);
  for (Index d = 0; d < dim; ++d) {
    const auto k = static_cast<std::size_t>(d);
    const double beta = cycloneCoefficient(r1[k], state.iteration, state.maxIterations);
    const double xi = state.positions(agent, d);
    const double ref = reference(d);
    const double pull = agent == 0 ? ref - xi : state.positions(agent - 1, d) - xi;
    next(d) = ref + r[k] * pull + beta * (ref - xi);
  }
  bounds.clamp(asSpan(next));
  return next;
}

Vector somersaultUpdate(const SwarmState& state, Index agent, double somersaultFactor,
                        std::span<const double> r2, std::span<const double> r3,
                        const Bounds& bounds) {
  checkAgent(state, agent);
  checkDraws(state, r2);
  checkDraws(state, r3);
  const Index dim = state.dimension();
  Vector next(dim);
  for (Index d = 0; d < dim; ++d) {
    const auto k = static_cast<std::size_t>(d);
    const double xi = state.positions(agent, d);
    next(d) = xi + somersaultFactor * (r2[k] * state.bestPosition(d) - r3[k] * xi);
  }
  bounds.clamp(asSpan(next));
  return next;
}

Vector levyWalkUpdate(std::span<const double> position, double mu, std::span<const double> signs,
                      std::span<const double> step, const Bounds& bounds) {
  if (signs.size() != position.size() || step.size() != position.size())
    throw ShapeError("Levy walk: position, sign and step lengths differ");
  Vector next(static_cast<Index>(position.size()));
  for (std::size_t d = 0; d < position.size(); ++d)
    next(static_cast<Index>(d)) = position[d] + mu * signs[d] * step[d];
  bounds.clamp(asSpan(next));
  return next;
}

Vector chainForagingStep(const SwarmState& state, Index agent, Rng& rng, const Bounds& bounds) {
  const auto r = uniforms(rng, state.dimension());
  return chainUpdate(state, agent, r, bounds);
}

Vector cycloneForagingStep(const SwarmState& state, Index agent, Rng& rng, const Vector& reference,
                           const Bounds& bounds) {
  const auto r = uniforms(rng, state.dimension());
  const auto r1 = uniforms(rng, state.dimension());
  return cycloneUpdate(state, agent, reference, r, r1, bounds);
}

Vector somersaultForagingStep(const SwarmState& state, Index agent, Rng& rng,
                              double somersaultFactor, const Bounds& bounds) {
  const auto r2 = uniforms(rng, state.dimension());
  const auto r3 = uniforms(rng, state.dimension());
  return somersaultUpdate(state, agent, somersaultFactor, r2, r3, bounds);
}

Vector applyLevyWalk(std::span<const double> position, const LevyStepSampler& sampler, Rng& rng,
                     const Bounds& bounds) {
  const auto dim = static_cast<Index>(position.size());
  const double mu = rng.uniform();
  std::vector<double> signs(position.size());
  for (double& s : signs) {
    const double u = rng.uniform() - 0.5;
    s = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
  }
  const Vector step = sampler.sample(dim, rng);
  return levyWalkUpdate(position, mu, signs, asSpan(step), bounds);
}

OptimizeResult minimize(const Objective& objective, const MrfoConfig& config,
                        const Observer& observer) {
  config.validate();
  const Bounds& bounds = config.bounds;
  const int n = config.populationSize;
  const Index dim = bounds.dimension();
  const auto seed = config.seed;
  const Execution exec = config.execution;
  const LevyStepSampler sampler(config.levyExponentBeta, config.resolvedLevyScale());

  SwarmState state;
  state.maxIterations = config.maxIterations;
  state.positions = initialPopulation(bounds, n, seed);
  state.fitnesses.resize(n);
  evaluatePopulation(objective, state.positions, asSpan(state.fitnesses), exec);
  state.bestPosition = state.positions.row(0).transpose();
  state.bestFitness = std::numeric_limits<double>::infinity();
  updateBest(state.positions, asSpan(state.fitnesses), state.bestPosition, state.bestFitness);
  if (observer) observer({0, "init", state.positions});

  OptimizeResult result;
  result.initialBestFitness = state.bestFitness;
  result.evaluations = static_cast<std::uint64_t>(n);
  result.history.reserve(static_cast<std::size_t>(config.maxIterations));

  PositionMatrix next(n, dim);
  for (int t = 1; t <= config.maxIterations; ++t) {
    state.iteration = t;
    const double progress = static_cast<double>(t) / config.maxIterations;

    // Foraging: every agent reads the iteration-start snapshot and the best at
    // the phase start, so agents are independent work items.
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel && n > 1)
    for (int i = 0; i < n; ++i) {
      Rng rng = Rng::stream(seed, {kForageStream, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(i)});
      Vector x;
      if (rng.uniform() < 0.5) {
        if (progress < rng.uniform()) {
          const Vector randomRef = bounds.sample(rng);
          x = cycloneForagingStep(state, i, rng, randomRef, bounds);
        } else {
          x = cycloneForagingStep(state, i, rng, state.bestPosition, bounds);
        }
      } else {
        x = chainForagingStep(state, i, rng, bounds);
      }
      next.row(i) = x.transpose();
    }
    state.positions.swap(next);
    evaluatePopulation(objective, state.positions, asSpan(state.fitnesses), exec);
    result.evaluations += static_cast<std::uint64_t>(n);
    updateBest(state.positions, asSpan(state.fitnesses), state.bestPosition, state.bestFitness);
    if (observer) observer({t, "forage", state.positions});

#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel && n > 1)
    for (int i = 0; i < n; ++i) {
      Rng rng = Rng::stream(seed, {kSomersaultStream, static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(i)});
      Vector x = somersaultForagingStep(state, i, rng, config.somersaultFactor, bounds);
      if (config.levyEnabled) {
        Rng levyRng = Rng::stream(seed, {kLevyStream, static_cast<std::uint64_t>(t),
                                         static_cast<std::uint64_t>(i)});
        x = applyLevyWalk(asSpan(x), sampler, levyRng, bounds);
      }
      next.row(i) = x.transpose();
    }
    state.positions.swap(next);
    evaluatePopulation(objective, state.positions, asSpan(state.fitnesses), exec);
    result.evaluations += static_cast<std::uint64_t>(n);
    updateBest(state.positions, asSpan(state.fitnesses), state.bestPosition, state.bestFitness);
    if (observer) observer({t, "somersault", state.positions});

    result.history.push_back(state.bestFitness);
  }

  result.bestPosition = state.bestPosition;
  result.bestFitness = state.bestFitness;
  return result;
}

}  // namespace eelm::opt
