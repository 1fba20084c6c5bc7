#include "eelm/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <omp.h>

#include "eelm/baselines.hpp"
#include "eelm/cli/config.hpp"
#include "eelm/cli/manifest.hpp"
#include "eelm/dataset.hpp"
#include "eelm/metrics.hpp"
#include "eelm/protocol.hpp"
#include "eelm/rdf.hpp"
#include "eelm/test_functions.hpp"
#include "eelm/trainer.hpp"
#include "eelm/xyz.hpp"

namespace eelm::cli {

namespace fs = std::filesystem;

namespace {

std::string fmtNum(double v) { return fmt::format("{:.17g}", v); }

std::ofstream openOutput(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
  return out;
}

void prepareOut(const GlobalOptions& g) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory {}: {}", g.out.string(), ec.message()));
}

Execution executionFor(int jobs) { return jobs == 1 ? Execution::serial : Execution::parallel; }

int threadsFor(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

// Runs `body` and turns exceptions into a nonzero exit with a manifest.
template <class F>
int guarded(const GlobalOptions& g, RunRecord& rec, F&& body) {
  try {
    return rec.finish(body());
  } catch (const ParseError& e) {
    *g.err << "error: " << e.what() << '\n';
    return rec.finish(1, e.what());
  } catch (const std::exception& e) {
    *g.err << "error: " << e.what() << '\n';
    return rec.finish(1, e.what());
  }
}

void printAggregates(std::ostream& out, const std::vector<harness::AggregateRow>& rows, const std::string& units) {
  out << fmt::format("{:<16} {:>6} {:>6} {:>14} {:>12} {:>10} {:>10} {:>10}\n", "model", "ok", "failed",
                     units.empty() ? std::string("rmse") : fmt::format("rmse [{}]", units), "rmse std", "test R2", "R2 std", "train R2");
  for (const auto& a : rows)
    out << fmt::format("{:<16} {:>6} {:>6} {:>14.6g} {:>12.4g} {:>10.6f} {:>10.4g} {:>10.6f}\n", a.model, a.okCells,
                       a.failedCells, a.meanTestRmse, a.stdTestRmse, a.meanTestR2, a.stdTestR2, a.meanTrainR2);
}

ExperimentConfig experimentFor(const GlobalOptions& g, const std::optional<fs::path>& dataset) {
  if (!g.config) throw ConfigError("this command needs --config");
  ExperimentConfig cfg = loadExperimentConfig(*g.config);
  if (dataset) {
    cfg.data.source = DataSection::Source::csv;
    cfg.data.path = *dataset;
  }
  if (g.seed) cfg.plan.masterSeed = *g.seed;
  return cfg;
}

}  // namespace

int commandFeaturize(const GlobalOptions& g, const fs::path& structures) {
  RunRecord rec("featurize", g.out);
  rec.set("input", structures.string());
  return guarded(g, rec, [&] {
    const FeaturizeConfig cfg = g.config ? loadFeaturizeConfig(*g.config) : FeaturizeConfig{};
    if (!fs::exists(structures)) throw ConfigError(fmt::format("structure file not found: {}", structures.string()));
    const auto list = rdf::readExtendedXyz(structures);
    if (list.empty()) throw ConfigError(fmt::format("no structures in {}", structures.string()));

    std::optional<rdf::FormationReference> reference;
    if (cfg.targets) {
      const auto& sp = cfg.species;
      reference = cfg.energyA ? rdf::FormationReference{sp[0], sp[1], *cfg.energyA, *cfg.energyB}
                              : rdf::FormationReference::fromPureStructures(list, sp[0], sp[1]);
    }
    if (g.jobs > 0) omp_set_num_threads(g.jobs);
    const auto ds = rdf::featurize(list, cfg.rdf, reference, executionFor(g.jobs));

    prepareOut(g);
    const auto csvPath = g.out / "features.csv";
    {
      auto out = openOutput(csvPath);
      ds.writeCsv(out);
    }
    rec.addOutput(csvPath);

    nlohmann::json meta = {
        {"config_hash", ds.configHash},
        {"species", ds.species},
        {"rows", ds.rows()},
        {"feature_columns", ds.features.cols()},
        {"target_units", ds.targets ? nlohmann::json(ds.targetUnits) : nlohmann::json()},
        {"rdf",
         {{"cutoff", cfg.rdf.cutoff},
          {"width", cfg.rdf.gaussianWidth},
          {"exponent", cfg.rdf.renormExponent},
          {"grid_points", cfg.rdf.gridPoints},
          {"grid_max", cfg.rdf.gridMax}}},
    };
    if (reference)
      meta["reference_energies"] = {{reference->speciesA, reference->energyA}, {reference->speciesB, reference->energyB}};
    const auto metaPath = g.out / "features.meta.json";
    openOutput(metaPath) << meta.dump(2) << '\n';
    rec.addOutput(metaPath);
    rec.set("config_hash", ds.configHash);

    const Index columns = ds.features.cols() + (ds.targets ? 1 : 0);
    *g.log << fmt::format("featurized {} structures: {} rows x {} columns -> {}\n", list.size(), ds.rows(), columns,
                          csvPath.string());
    return 0;
  });
}

int commandTrain(const GlobalOptions& g, const std::optional<std::string>& modelName,
                 const std::optional<fs::path>& dataset) {
  RunRecord rec("train", g.out);
  return guarded(g, rec, [&] {
    const ExperimentConfig cfg = experimentFor(g, dataset);
    const harness::ModelEntry* model = &cfg.models.front();
    if (modelName) {
      const auto it = std::find_if(cfg.models.begin(), cfg.models.end(),
                                   [&](const harness::ModelEntry& m) { return m.name == *modelName; });
      if (it == cfg.models.end()) throw ConfigError(fmt::format("no [model.{}] section in the config", *modelName));
      model = &*it;
    }
    auto data = cfg.data.load();
    std::optional<harness::MinMaxScaler> scaler;
    if (cfg.scaleFeatures) {
      scaler = harness::MinMaxScaler::fit(data.inputs);
      data.inputs = scaler->transform(data.inputs);
    }
    const std::uint64_t seed = cfg.plan.masterSeed;
    if (g.jobs > 0) omp_set_num_threads(g.jobs);

    elm::ElmModel fitted;
    std::optional<train::RunManifest> manifest;
    if (const auto* plain = std::get_if<harness::PlainElmConfig>(&model->config)) {
      fitted = train::trainPlainElm(data, plain->hiddenNodes, plain->activation, plain->penalty, seed);
    } else {
      auto tc = std::get<train::TrainingRunConfig>(model->config);
      tc.seed = seed;
      tc.execution = executionFor(g.jobs);
      auto result = train::train(data, tc);
      fitted = std::move(result.model);
      manifest = std::move(result.manifest);
    }
    const Vector pred = elm::predict(fitted, data.inputs);
    const double scale = cfg.data.resolvedTargetScale();
    const double trainRmse = scale * harness::rmse(pred, data.targets);
    const double trainR2 = harness::rSquared(pred, data.targets);

    prepareOut(g);
    auto asList = [](const auto& m) { return std::vector<double>(m.data(), m.data() + m.size()); };
    Matrix rowMajorWeights = fitted.inputWeights;
    nlohmann::json mj = {
        {"model", model->name},
        {"activation", elm::toString(fitted.activation)},
        {"hidden_nodes", fitted.hiddenCount()},
        {"inputs", fitted.inputCount()},
        {"penalty", fitted.penalty},
        {"input_weights", nlohmann::json::array()},
        {"hidden_biases", asList(fitted.hiddenBiases)},
        {"output_weights", asList(fitted.outputWeights)},
    };
    for (Index k = 0; k < rowMajorWeights.rows(); ++k) {
      const Vector row = rowMajorWeights.row(k).transpose();
      mj["input_weights"].push_back(asList(row));
    }
    if (scaler) mj["feature_scaling"] = {{"min", asList(scaler->minimum())}, {"max", asList(scaler->maximum())}};
    const auto modelPath = g.out / "model.json";
    openOutput(modelPath) << mj.dump(1) << '\n';
    rec.addOutput(modelPath);

    nlohmann::json record = {{"record", "train"}, {"model", model->name}, {"seed", seed},
                             {"config_hash", train::hashJson(model->toJson())}, {"train_rmse", trainRmse},
                             {"train_r2", trainR2}};
    if (manifest) record["run"] = manifest->toJson();
    const auto manifestPath = g.out / "manifest.jsonl";
    openOutput(manifestPath) << record.dump() << '\n';
    rec.addOutput(manifestPath);
    rec.set("seed", seed);

    *g.log << fmt::format("trained {} on {} samples: train RMSE {:.6g} {}, R2 {:.6f}\n", model->name,
                          data.sampleCount(), trainRmse, cfg.data.resolvedUnits(), trainR2);
    if (manifest)
      *g.log << fmt::format("fitness {:.6g} -> {:.6g} over {} iterations ({} evaluations)\n",
                            manifest->initialBestFitness, manifest->bestFitness, manifest->history.size(),
                            manifest->evaluations);
    return 0;
  });
}

int commandBenchmarkOptimizers(const GlobalOptions& g) {
  RunRecord rec("benchmark-optimizers", g.out);
  return guarded(g, rec, [&] {
    BenchmarkConfig cfg = g.config ? loadBenchmarkConfig(*g.config) : BenchmarkConfig{};
    if (g.seed) cfg.seed = *g.seed;
    cfg.validate();
    rec.set("seed", cfg.seed);

    struct Job {
      std::string function;
      Index dim;
      opt::OptimizerKind kind;
      int iterations;
      std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& f : cfg.functions)
      for (Index d : cfg.dimensions)
        for (auto k : cfg.optimizers) {
          const int iters = cfg.evaluations ? opt::iterationsForBudget(k, cfg.population, *cfg.evaluations)
                                            : cfg.iterations;
          for (int s = 0; s < cfg.seeds; ++s) jobs.push_back({f, d, k, iters, cfg.seed + static_cast<std::uint64_t>(s)});
        }

    std::vector<opt::OptimizeResult> results(jobs.size());
    const int threads = threadsFor(g.jobs);
    const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
    for (long j = 0; j < count; ++j) {
      const Job& job = jobs[static_cast<std::size_t>(j)];
      const auto fn = opt::benchmarkFunction(job.function);
      opt::OptimizerSpec spec;
      spec.kind = job.kind;
      spec.populationSize = cfg.population;
      spec.maxIterations = job.iterations;
      spec.bounds = opt::Bounds::uniform(job.dim, fn.lower, fn.upper);
      spec.seed = job.seed;
      spec.execution = Execution::serial;
      results[static_cast<std::size_t>(j)] = opt::minimizeWith(spec, fn.objective);
    }

    prepareOut(g);
    const auto convPath = g.out / "convergence.csv";
    {
      auto out = openOutput(convPath);
      out << "optimizer,function,dim,seed,iteration,evaluations,best_fitness\n";
      for (std::size_t j = 0; j < jobs.size(); ++j) {
        const auto& job = jobs[j];
        const auto& r = results[j];
        const auto perIter = static_cast<std::uint64_t>(opt::evaluationsPerIteration(job.kind, cfg.population));
        const auto prefix = fmt::format("{},{},{},{},", opt::toString(job.kind), job.function, job.dim, job.seed);
        out << prefix << 0 << ',' << cfg.population << ',' << fmtNum(r.initialBestFitness) << '\n';
        for (std::size_t t = 0; t < r.history.size(); ++t)
          out << prefix << t + 1 << ',' << cfg.population + perIter * (t + 1) << ',' << fmtNum(r.history[t]) << '\n';
      }
    }
    rec.addOutput(convPath);

    const auto sumPath = g.out / "summary.csv";
    auto sum = openOutput(sumPath);
    sum << "optimizer,function,dim,iterations,evaluations,seeds,median_final,mean_final,min_final,max_final\n";
    *g.log << fmt::format("{:<14} {:<11} {:>4} {:>6} {:>8} {:>13} {:>13} {:>13}\n", "optimizer", "function", "dim",
                          "iters", "evals", "median", "mean", "worst");
    for (std::size_t start = 0; start < jobs.size(); start += static_cast<std::size_t>(cfg.seeds)) {
      std::vector<double> finals;
      for (int s = 0; s < cfg.seeds; ++s) finals.push_back(results[start + static_cast<std::size_t>(s)].bestFitness);
      std::vector<double> sorted = finals;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t n = sorted.size();
      const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
      const double mean = harness::mean(finals);
      const auto& job = jobs[start];
      const auto evals = results[start].evaluations;
      sum << fmt::format("{},{},{},{},{},{},", opt::toString(job.kind), job.function, job.dim, job.iterations, evals,
                         cfg.seeds)
          << fmtNum(median) << ',' << fmtNum(mean) << ',' << fmtNum(sorted.front()) << ',' << fmtNum(sorted.back())
          << '\n';
      *g.log << fmt::format("{:<14} {:<11} {:>4} {:>6} {:>8} {:>13.6g} {:>13.6g} {:>13.6g}\n", opt::toString(job.kind),
                            job.function, job.dim, job.iterations, evals, median, mean, sorted.back());
    }
    rec.addOutput(sumPath);
    return 0;
  });
}

int commandProtocol(const GlobalOptions& g, const std::optional<fs::path>& dataset) {
  RunRecord rec("protocol", g.out);
  return guarded(g, rec, [&] {
    const ExperimentConfig cfg = experimentFor(g, dataset);
    const auto data = cfg.data.load();
    rec.set("seed", cfg.plan.masterSeed);
    rec.set("samples", data.sampleCount());

    harness::ProtocolOptions po;
    po.jobs = g.jobs;
    po.targetScale = cfg.data.resolvedTargetScale();
    po.units = cfg.data.resolvedUnits();
    po.scaleFeatures = cfg.scaleFeatures;
    const auto report = harness::runProtocol(data, cfg.models, cfg.plan, po);

    prepareOut(g);
    const std::pair<const char*, void (harness::MetricsReport::*)(std::ostream&) const> files[] = {
        {"metrics.csv", &harness::MetricsReport::writeCsv},
        {"scatter.csv", &harness::MetricsReport::writeScatterCsv},
        {"manifest.jsonl", &harness::MetricsReport::writeManifests},
        {"timings.csv", &harness::MetricsReport::writeTimingsCsv},
    };
    for (const auto& [name, write] : files) {
      const auto path = g.out / name;
      auto out = openOutput(path);
      (report.*write)(out);
      rec.addOutput(path);
    }

    int failed = 0;
    for (const auto& c : report.cells) {
      if (c.ok) continue;
      ++failed;
      *g.err << fmt::format("cell {} run {} fold {} failed: {}\n", c.model, c.run, c.fold, c.error);
    }
    rec.set("failed_cells", failed);
    printAggregates(*g.log, report.aggregates, report.units);
    if (report.allFailed()) {
      *g.err << "error: every cell failed\n";
      return 1;
    }
    return 0;
  });
}

int commandReport(const GlobalOptions& g, const fs::path& metrics) {
  try {
    std::ifstream in(metrics);
    if (!in) throw ConfigError(fmt::format("cannot open {}", metrics.string()));
    std::string line;
    if (!std::getline(in, line) || line.rfind("row_type,model,", 0) != 0)
      throw ConfigError(fmt::format("{} is not a metrics file written by `protocol`", metrics.string()));
    std::vector<harness::AggregateRow> rows;
    std::size_t lineNo = 1;
    while (std::getline(in, line)) {
      ++lineNo;
      if (line.rfind("aggregate,", 0) != 0) continue;
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
      if (f.size() != 13) throw ParseError(lineNo, fmt::format("expected 13 fields, got {}", f.size()));
      auto num = [&](std::size_t i) {
        try {
          return std::stod(f[i]);
        } catch (const std::exception&) {
          throw ParseError(lineNo, fmt::format("bad number '{}'", f[i]));
        }
      };
      harness::AggregateRow a;
      a.model = f[1];
      a.meanTrainR2 = num(5);
      a.meanTestRmse = num(6);
      a.meanTestR2 = num(7);
      a.stdTrainR2 = num(8);
      a.stdTestRmse = num(9);
      a.stdTestR2 = num(10);
      a.okCells = static_cast<int>(num(11));
      a.failedCells = static_cast<int>(num(12));
      rows.push_back(a);
    }
    if (rows.empty()) throw ConfigError(fmt::format("{} has no aggregate rows", metrics.string()));
    printAggregates(*g.log, rows, "");
    return 0;
  } catch (const std::exception& e) {
    *g.err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace eelm::cli
