#pragma once

// INI-style experiment files:
//
//   # comment
//   [section]
//   key = value
//
// Sections: [data], [plan], [output], [rdf], [targets], [benchmark] and one
// [model.NAME] per compared model, kept in file order. Lists are
// comma-separated. See configs/ for complete examples.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eelm/baselines.hpp"
#include "eelm/folds.hpp"
#include "eelm/protocol.hpp"
#include "eelm/rdf.hpp"
#include "eelm/synthetic.hpp"

namespace eelm::cli {

struct DataSection {
  enum class Source { synthetic, csv };
  Source source = Source::synthetic;
  harness::SyntheticKind synthetic = harness::SyntheticKind::sinc1d;
  Index samples = 200;
  double noise = 0.05;
  std::uint64_t seed = 0;
  std::filesystem::path path;  // relative paths resolve against the config file
  /// Unset: 1000 for CSV data (eV/atom -> meV/atom), 1 for synthetic data.
  std::optional<double> targetScale;
  std::string units;

  double resolvedTargetScale() const noexcept;
  std::string resolvedUnits() const;
  elm::RegressionData load() const;
};

struct ExperimentConfig {
  DataSection data;
  harness::FoldPlan plan;
  std::vector<harness::ModelEntry> models;
  bool scaleFeatures = true;
};

struct FeaturizeConfig {
  FeaturizeConfig();

  rdf::RdfConfig rdf;
  std::vector<std::string> species{"Li", "Ge"};
  bool targets = true;
  /// Explicit pure-element energies; otherwise the lowest pure structures are used.
  std::optional<double> energyA;
  std::optional<double> energyB;
};

struct BenchmarkConfig {
  std::vector<std::string> functions{"sphere"};
  std::vector<Index> dimensions{2};
  std::vector<opt::OptimizerKind> optimizers{opt::OptimizerKind::mrfo, opt::OptimizerKind::mrfoLevy};
  int seeds = 20;
  std::uint64_t seed = 0;
  int population = 20;
  int iterations = 50;
  /// When set, every optimizer gets the iteration count this budget affords.
  std::optional<long long> evaluations;

  void validate() const;
};

ExperimentConfig loadExperimentConfig(const std::filesystem::path& path);
ExperimentConfig parseExperimentConfig(std::istream& in, const std::filesystem::path& baseDir = {});

FeaturizeConfig loadFeaturizeConfig(const std::filesystem::path& path);
FeaturizeConfig parseFeaturizeConfig(std::istream& in);

BenchmarkConfig loadBenchmarkConfig(const std::filesystem::path& path);
BenchmarkConfig parseBenchmarkConfig(std::istream& in);

}  // namespace eelm::cli
