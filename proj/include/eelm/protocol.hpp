#pragma once

// Repeated k-fold comparison of ELM variants: every model is trained on the
// same folds with the same per-cell seed, so rows are paired across models.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eelm/elm.hpp"
#include "eelm/folds.hpp"
#include "eelm/trainer.hpp"

namespace eelm::harness {

/// Non-evolutionary baseline: one random hidden layer, one solve.
struct PlainElmConfig {
  Index hiddenNodes = 300;
  elm::Activation activation = elm::Activation::sigmoid;
  double penalty = 0.0;
  std::vector<double> penaltyGrid;
  double fitnessFraction = 0.2;

  nlohmann::json toJson() const;
};

struct ModelEntry {
  std::string name;
  std::variant<PlainElmConfig, train::TrainingRunConfig> config;

  nlohmann::json toJson() const;
};

struct ProtocolOptions {
  /// Worker threads over (model, run, fold) cells; 0 = all hardware threads,
  /// 1 = the serial reference path.
  int jobs = 0;
  /// Multiplies RMSE and scatter values (1000 turns eV/atom into meV/atom).
  double targetScale = 1.0;
  std::string units = "target";
  /// Min-max scale features with training-fold statistics.
  bool scaleFeatures = true;
};

struct CellResult {
  std::string model;
  int run = 0;
  int fold = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double trainR2 = 0.0;
  double testRmse = 0.0;  // scaled units
  double testR2 = 0.0;
  double seconds = 0.0;  // wall clock; excluded from deterministic outputs
  std::vector<Index> testIndices;
  Vector testPredictions;  // scaled units
  Vector testTargets;      // scaled units
  std::optional<train::RunManifest> manifest;
  std::string configHash;
};

struct AggregateRow {
  std::string model;
  int okCells = 0;
  int failedCells = 0;
  double meanTrainR2 = 0.0, stdTrainR2 = 0.0;
  double meanTestRmse = 0.0, stdTestRmse = 0.0;
  double meanTestR2 = 0.0, stdTestR2 = 0.0;
};

struct MetricsReport {
  std::vector<CellResult> cells;  // model-major, then run, then fold
  std::vector<AggregateRow> aggregates;
  std::string units;
  double targetScale = 1.0;

  /// One row per cell plus one aggregate row per model; no timing columns.
  void writeCsv(std::ostream& out) const;
  void writeTimingsCsv(std::ostream& out) const;
  /// One JSON object per line per cell; wall-clock time sits under "volatile".
  void writeManifests(std::ostream& out) const;
  /// Two columns per model (predicted, actual) over the pooled test folds.
  void writeScatterCsv(std::ostream& out) const;

  const AggregateRow& aggregateFor(const std::string& model) const;
  bool allFailed() const noexcept;
};

std::uint64_t cellSeed(std::uint64_t masterSeed, int run, int fold) noexcept;

CellResult runCell(const elm::RegressionData& data, const Fold& fold, const ModelEntry& model,
                   int run, int foldIndex, std::uint64_t seed, const ProtocolOptions& options,
                   Execution inner);

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<ModelEntry>& models);

MetricsReport runProtocol(const elm::RegressionData& data, const std::vector<ModelEntry>& models,
                          const FoldPlan& plan, const ProtocolOptions& options = {});

}  // namespace eelm::harness
