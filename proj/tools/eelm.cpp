#include <CLI11.hpp>
#include <omp.h>

#include "eelm/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace eelm::cli;
  omp_set_max_active_levels(1);

  CLI::App app{"Evolutionary extreme learning machines: featurize, train, benchmark, compare"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  std::string config, out = "out";
  std::uint64_t seed = 0;
  app.add_option("--config", config, "INI experiment file")->check(CLI::ExistingFile);
  auto* seedOpt = app.add_option("--seed", seed, "overrides the seed in the config");
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads; 0 = all cores, 1 = serial reference path")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  std::string input;
  auto* featurize = app.add_subcommand("featurize", "partial-RDF features from an extended-XYZ file");
  featurize->add_option("input", input, "structures (.xyz)")->required();

  std::string model, dataset;
  auto* train = app.add_subcommand("train", "train one configured model on the whole dataset");
  train->add_option("--model", model, "model section name (default: the first)");
  train->add_option("--data", dataset, "feature CSV overriding [data]");

  auto* bench = app.add_subcommand("benchmark-optimizers", "optimizer suite on sphere/rastrigin/rosenbrock");

  auto* protocol = app.add_subcommand("protocol", "repeated k-fold comparison of the configured models");
  protocol->add_option("--data", dataset, "feature CSV overriding [data]");

  std::string metrics;
  auto* report = app.add_subcommand("report", "print the aggregate table of a metrics.csv");
  report->add_option("metrics", metrics, "metrics.csv from `protocol`")->required();

  CLI11_PARSE(app, argc, argv);
  if (!config.empty()) g.config = config;
  if (*seedOpt) g.seed = seed;
  g.out = out;

  auto optionalPath = [](const std::string& s) -> std::optional<std::filesystem::path> {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
  };
  if (*featurize) return commandFeaturize(g, input);
  if (*train) return commandTrain(g, model.empty() ? std::nullopt : std::optional<std::string>(model), optionalPath(dataset));
  if (*bench) return commandBenchmarkOptimizers(g);
  if (*protocol) return commandProtocol(g, optionalPath(dataset));
  if (*report) return commandReport(g, metrics);
  return 2;
}
