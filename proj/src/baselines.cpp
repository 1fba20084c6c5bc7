#include "eelm/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

namespace eelm::opt {

OptimizerKind parseOptimizerKind(std::string_view name) {
  if (name == "mrfo") return OptimizerKind::mrfo;
  if (name == "mrfoLevy" || name == "mrfo-levy" || name == "mrfo_lf") return OptimizerKind::mrfoLevy;
  if (name == "pso") return OptimizerKind::pso;
  if (name == "ga") return OptimizerKind::ga;
  if (name == "woa") return OptimizerKind::woa;
  if (name == "randomSearch" || name == "random") return OptimizerKind::randomSearch;
  throw ConfigError(fmt::format("unknown optimizer kind '{}'", name));
}

std::string_view toString(OptimizerKind kind) noexcept {
  switch (kind) {
    case OptimizerKind::mrfo: return "mrfo";
    case OptimizerKind::mrfoLevy: return "mrfoLevy";
    case OptimizerKind::pso: return "pso";
    case OptimizerKind::ga: return "ga";
    case OptimizerKind::woa: return "woa";
    case OptimizerKind::randomSearch: return "randomSearch";
  }
  return "?";
}

void OptimizerSpec::validate() const {
  if (populationSize < 1) throw ConfigError("population size must be >= 1");
  if (maxIterations < 0) throw ConfigError("iteration count must be >= 0");
  bounds.validate();
  switch (kind) {
    case OptimizerKind::mrfo:
    case OptimizerKind::mrfoLevy:
      toMrfoConfig().validate();
      break;
    case OptimizerKind::pso:
      if (!(pso.inertia >= 0.0) || !(pso.cognitive >= 0.0) || !(pso.social >= 0.0))
        throw ConfigError("PSO coefficients must be >= 0");
      if (!(pso.velocityClamp > 0.0)) throw ConfigError("PSO velocity clamp must be > 0");
      break;
    case OptimizerKind::ga:
      if (!(ga.crossoverRate >= 0.0 && ga.crossoverRate <= 1.0))
        throw ConfigError("GA crossover rate must lie in [0, 1]");
      if (!(ga.mutationRate >= 0.0 && ga.mutationRate <= 1.0))
        throw ConfigError("GA mutation rate must lie in [0, 1]");
      if (!(ga.mutationScale >= 0.0)) throw ConfigError("GA mutation scale must be >= 0");
      if (ga.tournamentSize < 1) throw ConfigError("GA tournament size must be >= 1");
      if (!(ga.blendAlpha >= 0.0)) throw ConfigError("GA blend alpha must be >= 0");
      if (ga.elites < 0 || ga.elites > populationSize)
        throw ConfigError("GA elite count must lie in [0, population]");
      break;
    case OptimizerKind::woa:
      if (!std::isfinite(woa.spiralConstant)) throw ConfigError("WOA spiral constant must be finite");
      break;
    case OptimizerKind::randomSearch:
      break;
  }
}

int evaluationsPerIteration(OptimizerKind kind, int populationSize, int gaElites) noexcept {
  switch (kind) {
    case OptimizerKind::mrfo:
    case OptimizerKind::mrfoLevy:
      return 2 * populationSize;
    case OptimizerKind::ga:
      return std::max(1, populationSize - gaElites);
    default:
      return populationSize;
  }
}

int OptimizerSpec::evaluationsPerIteration() const noexcept {
  return opt::evaluationsPerIteration(kind, populationSize, ga.elites);
}

int iterationsForBudget(OptimizerKind kind, int populationSize, long long evaluations,
                        int gaElites) noexcept {
  const long long per = evaluationsPerIteration(kind, populationSize, gaElites);
  return static_cast<int>(std::max(0LL, evaluations / per));
}

MrfoConfig OptimizerSpec::toMrfoConfig() const {
  MrfoConfig c;
  c.populationSize = populationSize;
  c.maxIterations = maxIterations;
  c.bounds = bounds;
  c.somersaultFactor = mrfo.somersaultFactor;
  c.levyEnabled = kind == OptimizerKind::mrfoLevy;
  c.levyExponentBeta = mrfo.levyExponentBeta;
  c.levyScale = mrfo.levyScale;
  c.seed = seed;
  c.execution = execution;
  return c;
}

OptimizeResult minimizeWith(const OptimizerSpec& spec, const Objective& objective,
                            const Observer& observer) {
  spec.validate();
  switch (spec.kind) {
    case OptimizerKind::mrfo:
    case OptimizerKind::mrfoLevy:
      return minimize(objective, spec.toMrfoConfig(), observer);
    case OptimizerKind::pso: return minimizePso(spec, objective, observer);
    case OptimizerKind::ga: return minimizeGa(spec, objective, observer);
    case OptimizerKind::woa: return minimizeWoa(spec, objective, observer);
    case OptimizerKind::randomSearch: return minimizeRandomSearch(spec, objective, observer);
  }
  throw ConfigError("unhandled optimizer kind");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Population {
  PositionMatrix positions;
  Vector fitness;
};

Population evaluatedInitial(const OptimizerSpec& spec, const Objective& objective,
                            OptimizeResult& result, Vector& best, double& bestFitness,
                            const Observer& observer) {
  Population pop;
  pop.positions = initialPopulation(spec.bounds, spec.populationSize, spec.seed);
  pop.fitness.resize(spec.populationSize);
  evaluatePopulation(objective, pop.positions, asSpan(pop.fitness), spec.execution);
  best = pop.positions.row(0).transpose();
  bestFitness = kInf;
  updateBest(pop.positions, asSpan(pop.fitness), best, bestFitness);
  result.initialBestFitness = bestFitness;
  result.evaluations = static_cast<std::uint64_t>(spec.populationSize);
  result.history.reserve(static_cast<std::size_t>(spec.maxIterations));
  if (observer) observer({0, "init", pop.positions});
  return pop;
}

std::uint64_t u64(Index v) { return static_cast<std::uint64_t>(v); }

}  // namespace

OptimizeResult minimizePso(const OptimizerSpec& spec, const Objective& objective,
                           const Observer& observer) {
  spec.validate();
  OptimizeResult result;
  Vector gbest;
  double gbestFitness;
  Population pop = evaluatedInitial(spec, objective, result, gbest, gbestFitness, observer);
  const Index n = spec.populationSize;
  const Index dim = spec.bounds.dimension();
  const Vector vmax = spec.pso.velocityClamp * spec.bounds.width();
  PositionMatrix velocity = PositionMatrix::Zero(n, dim);
  PositionMatrix pbest = pop.positions;
  Vector pbestFitness = pop.fitness;

  for (int t = 1; t <= spec.maxIterations; ++t) {
#pragma omp parallel for schedule(dynamic) if (spec.execution == Execution::parallel && n > 1)
    for (Index i = 0; i < n; ++i) {
      Rng rng = Rng::stream(spec.seed, {kPsoStream, static_cast<std::uint64_t>(t), u64(i)});
      for (Index d = 0; d < dim; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        const double x = pop.positions(i, d);
        double v = spec.pso.inertia * velocity(i, d) + spec.pso.cognitive * r1 * (pbest(i, d) - x) +
                   spec.pso.social * r2 * (gbest(d) - x);
        v = std::clamp(v, -vmax(d), vmax(d));
        velocity(i, d) = v;
        pop.positions(i, d) = x + v;
      }
      spec.bounds.clamp(rowSpan(pop.positions, i));
    }
    evaluatePopulation(objective, pop.positions, asSpan(pop.fitness), spec.execution);
    result.evaluations += u64(n);
    for (Index i = 0; i < n; ++i) {
      if (pop.fitness(i) < pbestFitness(i)) {
        pbestFitness(i) = pop.fitness(i);
        pbest.row(i) = pop.positions.row(i);
      }
    }
    updateBest(pop.positions, asSpan(pop.fitness), gbest, gbestFitness);
    if (observer) observer({t, "update", pop.positions});
    result.history.push_back(gbestFitness);
  }
  result.bestPosition = gbest;
  result.bestFitness = gbestFitness;
  return result;
}

PositionMatrix gaNextGeneration(const PositionMatrix& population, std::span<const double> fitness,
                                const GaParams& params, const Bounds& bounds, std::uint64_t seed,
                                int generation, Execution exec) {
  const Index n = population.rows();
  const Index dim = population.cols();
  if (static_cast<Index>(fitness.size()) != n)
    throw ShapeError("GA: fitness length differs from population size");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return fitness[static_cast<std::size_t>(a)] < fitness[static_cast<std::size_t>(b)];
  });
  const Index elites = std::min<Index>(params.elites, n);
  const Vector width = bounds.width();

  PositionMatrix next(n, dim);
  for (Index e = 0; e < elites; ++e) next.row(e) = population.row(order[static_cast<std::size_t>(e)]);

#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel && n > 1)
  for (Index slot = elites; slot < n; ++slot) {
    Rng rng = Rng::stream(seed, {kGaStream, static_cast<std::uint64_t>(generation), u64(slot)});
    auto tournament = [&] {
      Index winner = -1;
      for (int k = 0; k < params.tournamentSize; ++k) {
        const auto pick = std::min<Index>(static_cast<Index>(rng.uniform() * static_cast<double>(n)), n - 1);
        if (winner < 0 || fitness[static_cast<std::size_t>(pick)] < fitness[static_cast<std::size_t>(winner)])
          winner = pick;
      }
      return winner;
    };
    const Index a = tournament();
    const Index b = tournament();
    const bool cross = rng.uniform() < params.crossoverRate;
    for (Index d = 0; d < dim; ++d) {
      double gene;
      if (cross) {
        const double lo = std::min(population(a, d), population(b, d));
        const double hi = std::max(population(a, d), population(b, d));
        const double spread = params.blendAlpha * (hi - lo);
        gene = rng.uniform(lo - spread, hi + spread);
      } else {
        gene = population(a, d);
      }
      if (rng.uniform() < params.mutationRate) gene += params.mutationScale * width(d) * rng.normal();
      next(slot, d) = gene;
    }
    bounds.clamp(rowSpan(next, slot));
  }
  return next;
}

OptimizeResult minimizeGa(const OptimizerSpec& spec, const Objective& objective,
                          const Observer& observer) {
  spec.validate();
  OptimizeResult result;
  Vector best;
  double bestFitness;
  Population pop = evaluatedInitial(spec, objective, result, best, bestFitness, observer);
  const Index n = spec.populationSize;
  const Index elites = std::min<Index>(spec.ga.elites, n);

  for (int t = 1; t <= spec.maxIterations; ++t) {
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return pop.fitness(a) < pop.fitness(b); });
    Vector nextFitness(n);
    for (Index e = 0; e < elites; ++e) nextFitness(e) = pop.fitness(order[static_cast<std::size_t>(e)]);

    PositionMatrix next = gaNextGeneration(pop.positions, asSpan(pop.fitness), spec.ga, spec.bounds,
                                           spec.seed, t, spec.execution);
    const Index offspring = n - elites;
    if (offspring > 0) {
      PositionMatrix children = next.bottomRows(offspring);
      std::vector<double> childFitness(static_cast<std::size_t>(offspring));
      evaluatePopulation(objective, children, childFitness, spec.execution);
      for (Index k = 0; k < offspring; ++k) nextFitness(elites + k) = childFitness[static_cast<std::size_t>(k)];
      result.evaluations += u64(offspring);
    }
    pop.positions = std::move(next);
    pop.fitness = std::move(nextFitness);
    updateBest(pop.positions, asSpan(pop.fitness), best, bestFitness);
    if (observer) observer({t, "update", pop.positions});
    result.history.push_back(bestFitness);
  }
  result.bestPosition = best;
  result.bestFitness = bestFitness;
  return result;
}

OptimizeResult minimizeWoa(const OptimizerSpec& spec, const Objective& objective,
                           const Observer& observer) {
  spec.validate();
  OptimizeResult result;
  Vector leader;
  double leaderFitness;
  Population pop = evaluatedInitial(spec, objective, result, leader, leaderFitness, observer);
  const Index n = spec.populationSize;
  const Index dim = spec.bounds.dimension();
  const double b = spec.woa.spiralConstant;
  PositionMatrix next(n, dim);

  for (int t = 1; t <= spec.maxIterations; ++t) {
    const double a = 2.0 - 2.0 * static_cast<double>(t) / spec.maxIterations;
#pragma omp parallel for schedule(dynamic) if (spec.execution == Execution::parallel && n > 1)
    for (Index i = 0; i < n; ++i) {
      Rng rng = Rng::stream(spec.seed, {kWoaStream, static_cast<std::uint64_t>(t), u64(i)});
      const double r1 = rng.uniform();
      const double r2 = rng.uniform();
      const double coefA = 2.0 * a * r1 - a;
      const double coefC = 2.0 * r2;
      const double p = rng.uniform();
      const double l = rng.uniform(-1.0, 1.0);
      const auto randomAgent =
          std::min<Index>(static_cast<Index>(rng.uniform() * static_cast<double>(n)), n - 1);
      for (Index d = 0; d < dim; ++d) {
        const double x = pop.positions(i, d);
        double y;
        if (p < 0.5) {
          if (std::abs(coefA) < 1.0) {
            y = leader(d) - coefA * std::abs(coefC * leader(d) - x);
          } else {
            const double xr = pop.positions(randomAgent, d);
            y = xr - coefA * std::abs(coefC * xr - x);
          }
        } else {
          y = std::abs(leader(d) - x) * std::exp(b * l) * std::cos(2.0 * std::numbers::pi * l) +
              leader(d);
        }
        next(i, d) = y;
      }
      spec.bounds.clamp(rowSpan(next, i));
    }
    pop.positions.swap(next);
    evaluatePopulation(objective, pop.positions, asSpan(pop.fitness), spec.execution);
    result.evaluations += u64(n);
    updateBest(pop.positions, asSpan(pop.fitness), leader, leaderFitness);
    if (observer) observer({t, "update", pop.positions});
    result.history.push_back(leaderFitness);
  }
  result.bestPosition = leader;
  result.bestFitness = leaderFitness;
  return result;
}

OptimizeResult minimizeRandomSearch(const OptimizerSpec& spec, const Objective& objective,
                                    const Observer& observer) {
  spec.validate();
  OptimizeResult result;
  Vector best;
  double bestFitness;
  Population pop = evaluatedInitial(spec, objective, result, best, bestFitness, observer);
  const Index n = spec.populationSize;
  for (int t = 1; t <= spec.maxIterations; ++t) {
    for (Index i = 0; i < n; ++i) {
      Rng rng = Rng::stream(spec.seed, {kRandomSearchStream, static_cast<std::uint64_t>(t), u64(i)});
      pop.positions.row(i) = spec.bounds.sample(rng).transpose();
    }
    evaluatePopulation(objective, pop.positions, asSpan(pop.fitness), spec.execution);
    result.evaluations += u64(n);
    updateBest(pop.positions, asSpan(pop.fitness), best, bestFitness);
    if (observer) observer({t, "update", pop.positions});
    result.history.push_back(bestFitness);
  }
  result.bestPosition = best;
  result.bestFitness = bestFitness;
  return result;
}

}  // namespace eelm::opt
