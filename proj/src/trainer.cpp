#include "eelm/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "eelm/metrics.hpp"

namespace eelm::train {

using elm::ElmModel;
using elm::RegressionData;

ElmModel AgentLayout::decode(std::span<const double> agent, elm::Activation activation) const {
  if (static_cast<Index>(agent.size()) != dimension())
    throw ShapeError(fmt::format("agent vector has length {} but the layout needs {}", agent.size(), dimension()));
  ElmModel model;
  model.activation = activation;
  model.inputWeights.resize(hidden, inputs);
  for (Index k = 0; k < hidden; ++k)
    for (Index n = 0; n < inputs; ++n) model.inputWeights(k, n) = agent[static_cast<std::size_t>(k * inputs + n)];
  model.hiddenBiases = Vector::Zero(hidden);
  if (includeBiases)
    for (Index k = 0; k < hidden; ++k) model.hiddenBiases(k) = agent[static_cast<std::size_t>(hidden * inputs + k)];
  return model;
}

Vector AgentLayout::encode(const ElmModel& model) const {
  if (model.hiddenCount() != hidden || model.inputCount() != inputs)
    throw ShapeError(fmt::format("model is {}x{} but the layout is {}x{}", model.hiddenCount(),
                                 model.inputCount(), hidden, inputs));
  Vector v(dimension());
  for (Index k = 0; k < hidden; ++k)
    for (Index n = 0; n < inputs; ++n) v(k * inputs + n) = model.inputWeights(k, n);
  if (includeBiases) v.tail(hidden) = model.hiddenBiases;
  return v;
}

FitnessSplit splitForFitness(const RegressionData& data, double fitnessFraction, std::uint64_t seed) {
  if (!(fitnessFraction > 0.0 && fitnessFraction < 1.0))
    throw ConfigError("fitness split fraction must lie in (0, 1)");
  const Index n = data.sampleCount();
  if (n < 2) return {data, data};
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 engine(streamSeed(seed, {0x5b117ULL}));
  std::shuffle(idx.begin(), idx.end(), engine);
  auto fitCount = static_cast<Index>(std::llround(static_cast<double>(n) * fitnessFraction));
  fitCount = std::clamp<Index>(fitCount, 1, n - 1);
  std::span<const Index> all(idx);
  auto fitIdx = std::vector<Index>(all.begin(), all.begin() + fitCount);
  auto solveIdx = std::vector<Index>(all.begin() + fitCount, all.end());
  std::sort(fitIdx.begin(), fitIdx.end());
  std::sort(solveIdx.begin(), solveIdx.end());
  return {data.subset(solveIdx), data.subset(fitIdx)};
}

double agentFitness(std::span<const double> agent, const AgentLayout& layout,
                    elm::Activation activation, const RegressionData& trainSplit,
                    const RegressionData& fitSplit, double penalty) {
  try {
    ElmModel model = layout.decode(agent, activation);
    const auto h = elm::buildHiddenMatrix(model, trainSplit.inputs, Execution::serial);
    model.outputWeights = elm::solveOutputWeights(h, trainSplit.targets, penalty);
    const Vector y = elm::predict(model, fitSplit.inputs, Execution::serial);
    return opt::sanitizeFitness(harness::rmse(y, fitSplit.targets));
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

TrainingRunConfig::TrainingRunConfig() {
  optimizer.kind = opt::OptimizerKind::mrfoLevy;
  optimizer.populationSize = 20;
  optimizer.maxIterations = 50;
}

void TrainingRunConfig::validate() const {
  if (hiddenNodes < 1) throw ConfigError("hidden node count must be >= 1");
  if (!(weightLower < weightUpper)) throw ConfigError("weight bounds must satisfy lower < upper");
  if (!(penalty >= 0.0)) throw ConfigError("penalty must be >= 0");
  for (double p : penaltyGrid)
    if (!(p >= 0.0)) throw ConfigError("penalty grid values must be >= 0");
  if (!(fitnessFraction > 0.0 && fitnessFraction < 1.0))
    throw ConfigError("fitness split fraction must lie in (0, 1)");
}

nlohmann::json TrainingRunConfig::toJson() const {
  const auto& o = optimizer;
  nlohmann::json j = {
      {"hidden_nodes", hiddenNodes},
      {"activation", elm::toString(activation)},
      {"include_biases", includeBiases},
      {"weight_bounds", {weightLower, weightUpper}},
      {"penalty", penalty},
      {"penalty_grid", penaltyGrid},
      {"fitness_fraction", fitnessFraction},
      {"optimizer",
       {{"kind", opt::toString(o.kind)},
        {"population", o.populationSize},
        {"iterations", o.maxIterations},
        {"somersault_factor", o.mrfo.somersaultFactor},
        {"levy_exponent", o.mrfo.levyExponentBeta},
        {"levy_scale", o.mrfo.levyScale ? nlohmann::json(*o.mrfo.levyScale) : nlohmann::json()},
        {"pso", {o.pso.inertia, o.pso.cognitive, o.pso.social, o.pso.velocityClamp}},
        {"ga", {o.ga.crossoverRate, o.ga.mutationRate, o.ga.mutationScale, o.ga.tournamentSize,
                o.ga.blendAlpha, o.ga.elites}},
        {"woa_spiral", o.woa.spiralConstant}}},
  };
  return j;
}

nlohmann::json RunManifest::toJson() const {
  return {{"config_hash", configHash},
          {"seed", seed},
          {"optimizer", optimizer},
          {"initial_best_fitness", initialBestFitness},
          {"best_fitness", bestFitness},
          {"selected_penalty", selectedPenalty},
          {"evaluations", evaluations},
          {"history", history}};
}

std::string hashJson(const nlohmann::json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

double selectPenalty(const ElmModel& hiddenModel, const FitnessSplit& split, std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("empty penalty grid");
  const auto h = elm::buildHiddenMatrix(hiddenModel, split.solve.inputs, Execution::serial);
  double bestPenalty = grid.front();
  double bestRmse = std::numeric_limits<double>::infinity();
  for (double p : grid) {
    double err = std::numeric_limits<double>::infinity();
    try {
      ElmModel m = hiddenModel;
      m.outputWeights = elm::solveOutputWeights(h, split.solve.targets, p);
      err = opt::sanitizeFitness(harness::rmse(elm::predict(m, split.fitness.inputs, Execution::serial),
                                               split.fitness.targets));
    } catch (const NumericalError&) {
    }
    if (err < bestRmse) {
      bestRmse = err;
      bestPenalty = p;
    }
  }
  return bestPenalty;
}

TrainingResult train(const RegressionData& data, const TrainingRunConfig& config) {
  config.validate();
  const AgentLayout layout{data.featureCount(), config.hiddenNodes, config.includeBiases};
  const FitnessSplit split = splitForFitness(data, config.fitnessFraction, streamSeed(config.seed, {1}));

  opt::OptimizerSpec spec = config.optimizer;
  spec.bounds = opt::Bounds::uniform(layout.dimension(), config.weightLower, config.weightUpper);
  spec.seed = streamSeed(config.seed, {2});
  spec.execution = config.execution;

  const opt::Objective objective = [&](std::span<const double> agent) {
    return agentFitness(agent, layout, config.activation, split.solve, split.fitness, config.penalty);
  };
  const opt::OptimizeResult best = opt::minimizeWith(spec, objective);

  ElmModel model = layout.decode(opt::asSpan(best.bestPosition), config.activation);
  const double penalty = config.penaltyGrid.empty() ? config.penalty
                                                    : selectPenalty(model, split, config.penaltyGrid);
  const auto h = elm::buildHiddenMatrix(model, data.inputs, config.execution);
  model.outputWeights = elm::solveOutputWeights(h, data.targets, penalty);
  model.penalty = penalty;

  TrainingResult out;
  out.model = std::move(model);
  auto& m = out.manifest;
  m.configHash = hashJson(config.toJson());
  m.seed = config.seed;
  m.optimizer = std::string(opt::toString(spec.kind));
  m.history = best.history;
  m.initialBestFitness = best.initialBestFitness;
  m.bestFitness = best.bestFitness;
  m.selectedPenalty = penalty;
  m.evaluations = best.evaluations;
  return out;
}

ElmModel trainPlainElm(const RegressionData& data, Index hiddenNodes, elm::Activation activation,
                       double penalty, std::uint64_t seed) {
  if (hiddenNodes < 1) throw ConfigError("hidden node count must be >= 1");
  Rng rng = Rng::stream(seed, {0xe1e1ULL});
  ElmModel model;
  model.activation = activation;
  model.penalty = penalty;
  model.inputWeights.resize(hiddenNodes, data.featureCount());
  for (Index k = 0; k < hiddenNodes; ++k)
    for (Index n = 0; n < data.featureCount(); ++n) model.inputWeights(k, n) = rng.uniform(-1.0, 1.0);
  model.hiddenBiases.resize(hiddenNodes);
  for (Index k = 0; k < hiddenNodes; ++k) model.hiddenBiases(k) = rng.uniform(-1.0, 1.0);
  const auto h = elm::buildHiddenMatrix(model, data.inputs);
  model.outputWeights = elm::solveOutputWeights(h, data.targets, penalty);
  return model;
}

}  // namespace eelm::train
