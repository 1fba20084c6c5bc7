#pragma once

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace eelm::cli {

struct GlobalOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  /// 0 = all hardware threads, 1 = serial reference path.
  int jobs = 0;
  std::ostream* log = &std::cout;
  std::ostream* err = &std::cerr;
};

/// Extended-XYZ structures -> <out>/features.csv and features.meta.json.
int commandFeaturize(const GlobalOptions& g, const std::filesystem::path& structures);

/// Trains one configured model on the whole dataset -> <out>/model.json, manifest.jsonl.
int commandTrain(const GlobalOptions& g, const std::optional<std::string>& modelName,
                 const std::optional<std::filesystem::path>& dataset);

/// Optimizer suite on test functions -> <out>/convergence.csv, summary.csv.
int commandBenchmarkOptimizers(const GlobalOptions& g);

/// Repeated k-fold comparison -> <out>/metrics.csv, scatter.csv, manifest.jsonl, timings.csv.
int commandProtocol(const GlobalOptions& g, const std::optional<std::filesystem::path>& dataset);

/// Prints the aggregate rows of a metrics.csv written by `protocol`.
int commandReport(const GlobalOptions& g, const std::filesystem::path& metrics);

}  // namespace eelm::cli
