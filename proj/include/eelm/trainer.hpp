#pragma once

// Evolutionary ELM training: hidden-layer parameters are swarm agents, each
// agent's output weights come from the least-squares solve, and the swarm
// minimizes held-out RMSE.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eelm/baselines.hpp"
#include "eelm/elm.hpp"

namespace eelm::train {

/// Flat agent vector: the N input weights of hidden node 0, node 1, ...,
/// node M-1, followed by the M hidden biases when includeBiases is set.
struct AgentLayout {
  Index inputs = 1;
  Index hidden = 1;
  bool includeBiases = true;

  Index dimension() const noexcept { return hidden * inputs + (includeBiases ? hidden : 0); }
  /// Output weights are left empty; excluded biases decode as zero.
  elm::ElmModel decode(std::span<const double> agent, elm::Activation activation) const;
  Vector encode(const elm::ElmModel& model) const;
};

/// Deterministic 80/20-style split of a training fold into the part the
/// output weights are solved on and the part fitness is measured on.
struct FitnessSplit {
  elm::RegressionData solve;
  elm::RegressionData fitness;
};
FitnessSplit splitForFitness(const elm::RegressionData& data, double fitnessFraction, std::uint64_t seed);

/// RMSE on `fitSplit` of the model decoded from `agent` with output weights
/// solved on `trainSplit`; +infinity when the solve fails.
double agentFitness(std::span<const double> agent, const AgentLayout& layout,
                    elm::Activation activation, const elm::RegressionData& trainSplit,
                    const elm::RegressionData& fitSplit, double penalty);

struct TrainingRunConfig {
  Index hiddenNodes = 300;
  elm::Activation activation = elm::Activation::sigmoid;
  bool includeBiases = true;
  /// Kind, population, iterations and kind-specific parameters; bounds and
  /// seed are filled in from weightLower/weightUpper and `seed`.
  opt::OptimizerSpec optimizer;
  double weightLower = -1.0;
  double weightUpper = 1.0;
  double penalty = 0.0;
  /// When non-empty, the penalty is chosen from this grid by fitness-split RMSE.
  std::vector<double> penaltyGrid;
  double fitnessFraction = 0.2;
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;

  TrainingRunConfig();
  void validate() const;
  nlohmann::json toJson() const;
};

/// Reproducibility record of one training run.
struct RunManifest {
  std::string configHash;
  std::uint64_t seed = 0;
  std::string optimizer;
  std::vector<double> history;
  double initialBestFitness = 0.0;
  double bestFitness = 0.0;
  double selectedPenalty = 0.0;
  std::uint64_t evaluations = 0;

  nlohmann::json toJson() const;
};

struct TrainingResult {
  elm::ElmModel model;
  RunManifest manifest;
};

/// Optimizes hidden parameters, then re-solves the output weights of the best
/// agent on the full training data.
TrainingResult train(const elm::RegressionData& data, const TrainingRunConfig& config);

/// One random draw of weights and biases in [-1, 1] and a single solve.
elm::ElmModel trainPlainElm(const elm::RegressionData& data, Index hiddenNodes,
                            elm::Activation activation, double penalty, std::uint64_t seed);

/// Picks the grid penalty with the lowest fitness-split RMSE for fixed hidden
/// parameters (first minimum wins).
double selectPenalty(const elm::ElmModel& hiddenModel, const FitnessSplit& split,
                     std::span<const double> grid);

std::string hashJson(const nlohmann::json& j);

}  // namespace eelm::train
