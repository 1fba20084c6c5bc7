#include "eelm/protocol.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <omp.h>

#include "eelm/dataset.hpp"
#include "eelm/metrics.hpp"

namespace eelm::harness {

nlohmann::json PlainElmConfig::toJson() const {
  return {{"type", "elm"},
          {"hidden_nodes", hiddenNodes},
          {"activation", elm::toString(activation)},
          {"penalty", penalty},
          {"penalty_grid", penaltyGrid},
          {"fitness_fraction", fitnessFraction}};
}

nlohmann::json ModelEntry::toJson() const {
  nlohmann::json j = std::visit([](const auto& c) { return c.toJson(); }, config);
  if (std::holds_alternative<train::TrainingRunConfig>(config)) j["type"] = "eelm";
  j["name"] = name;
  return j;
}

std::uint64_t cellSeed(std::uint64_t masterSeed, int run, int fold) noexcept {
  return streamSeed(masterSeed, {0xce11ULL, static_cast<std::uint64_t>(run), static_cast<std::uint64_t>(fold)});
}

namespace {

std::string formatValue(double v) { return fmt::format("{:.17g}", v); }

elm::ElmModel fitPlain(const elm::RegressionData& train, const PlainElmConfig& cfg, std::uint64_t seed) {
  if (cfg.penaltyGrid.empty()) return train::trainPlainElm(train, cfg.hiddenNodes, cfg.activation, cfg.penalty, seed);
  const auto split = train::splitForFitness(train, cfg.fitnessFraction, streamSeed(seed, {1}));
  const auto hiddenOnly = train::trainPlainElm(train, cfg.hiddenNodes, cfg.activation, cfg.penaltyGrid.front(), seed);
  const double p = train::selectPenalty(hiddenOnly, split, cfg.penaltyGrid);
  return train::trainPlainElm(train, cfg.hiddenNodes, cfg.activation, p, seed);
}

}  // namespace

CellResult runCell(const elm::RegressionData& data, const Fold& fold, const ModelEntry& model,
                   int run, int foldIndex, std::uint64_t seed, const ProtocolOptions& options,
                   Execution inner) {
  CellResult cell;
  cell.model = model.name;
  cell.run = run;
  cell.fold = foldIndex;
  cell.seed = seed;
  cell.testIndices = fold.test;
  cell.configHash = train::hashJson(model.toJson());
  const auto start = std::chrono::steady_clock::now();
  try {
    elm::RegressionData trainSet = data.subset(fold.train);
    elm::RegressionData testSet = data.subset(fold.test);
    cell.testTargets = options.targetScale * testSet.targets;
    if (options.scaleFeatures) {
      const auto scaler = MinMaxScaler::fit(trainSet.inputs);
      trainSet.inputs = scaler.transform(trainSet.inputs);
      testSet.inputs = scaler.transform(testSet.inputs);
    }
    elm::ElmModel fitted;
    if (const auto* plain = std::get_if<PlainElmConfig>(&model.config)) {
      fitted = fitPlain(trainSet, *plain, seed);
    } else {
      auto cfg = std::get<train::TrainingRunConfig>(model.config);
      cfg.seed = seed;
      cfg.execution = inner;
      auto result = train::train(trainSet, cfg);
      fitted = std::move(result.model);
      cell.manifest = std::move(result.manifest);
    }
    const Vector trainPred = elm::predict(fitted, trainSet.inputs, inner);
    const Vector testPred = elm::predict(fitted, testSet.inputs, inner);
    cell.testPredictions = options.targetScale * testPred;
    cell.trainR2 = rSquared(trainPred, trainSet.targets);
    cell.testRmse = options.targetScale * rmse(testPred, testSet.targets);
    cell.testR2 = rSquared(testPred, testSet.targets);
    if (!std::isfinite(cell.trainR2) || !std::isfinite(cell.testRmse) || !std::isfinite(cell.testR2))
      throw NumericalError("non-finite metric");
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
    cell.testPredictions = Vector::Constant(static_cast<Index>(fold.test.size()),
                                            std::numeric_limits<double>::quiet_NaN());
    if (cell.testTargets.size() != static_cast<Index>(fold.test.size()))
      cell.testTargets = Vector::Constant(static_cast<Index>(fold.test.size()),
                                          std::numeric_limits<double>::quiet_NaN());
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cell;
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult>& cells,
                                    const std::vector<ModelEntry>& models) {
  std::vector<AggregateRow> rows;
  for (const auto& m : models) {
    AggregateRow row;
    row.model = m.name;
    std::vector<double> trainR2, rmseV, testR2;
    for (const auto& c : cells) {
      if (c.model != m.name) continue;
      if (!c.ok) {
        ++row.failedCells;
        continue;
      }
      ++row.okCells;
      trainR2.push_back(c.trainR2);
      rmseV.push_back(c.testRmse);
      testR2.push_back(c.testR2);
    }
    if (row.okCells > 0) {
      row.meanTrainR2 = mean(trainR2);
      row.stdTrainR2 = stddev(trainR2);
      row.meanTestRmse = mean(rmseV);
      row.stdTestRmse = stddev(rmseV);
      row.meanTestR2 = mean(testR2);
      row.stdTestR2 = stddev(testR2);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.meanTrainR2 = row.stdTrainR2 = row.meanTestRmse = row.stdTestRmse = row.meanTestR2 = row.stdTestR2 = nan;
    }
    rows.push_back(row);
  }
  return rows;
}

MetricsReport runProtocol(const elm::RegressionData& data, const std::vector<ModelEntry>& models,
                          const FoldPlan& plan, const ProtocolOptions& options) {
  plan.validate();
  if (models.empty()) throw ConfigError("protocol needs at least one model");
  for (std::size_t a = 0; a < models.size(); ++a)
    for (std::size_t b = a + 1; b < models.size(); ++b)
      if (models[a].name == models[b].name)
        throw ConfigError(fmt::format("duplicate model name '{}'", models[a].name));

  std::vector<std::vector<Fold>> folds;
  for (int r = 0; r < plan.runCount; ++r) folds.push_back(makeFolds(data.sampleCount(), plan, r));

  struct Job {
    std::size_t model;
    int run;
    int fold;
  };
  std::vector<Job> jobs;
  for (std::size_t m = 0; m < models.size(); ++m)
    for (int r = 0; r < plan.runCount; ++r)
      for (int f = 0; f < plan.foldCount; ++f) jobs.push_back({m, r, f});

  const int threads = options.jobs > 0 ? options.jobs : omp_get_max_threads();
  const Execution inner = Execution::serial;
  MetricsReport report;
  report.units = options.units;
  report.targetScale = options.targetScale;
  report.cells.resize(jobs.size());
  const auto count = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (long j = 0; j < count; ++j) {
    const Job& job = jobs[static_cast<std::size_t>(j)];
    report.cells[static_cast<std::size_t>(j)] =
        runCell(data, folds[static_cast<std::size_t>(job.run)][static_cast<std::size_t>(job.fold)],
                models[job.model], job.run, job.fold, cellSeed(plan.masterSeed, job.run, job.fold),
                options, inner);
  }
  report.aggregates = aggregate(report.cells, models);
  return report;
}

void MetricsReport::writeCsv(std::ostream& out) const {
  out << "row_type,model,run,fold,status,train_r2,test_rmse,test_r2,train_r2_std,test_rmse_std,"
         "test_r2_std,cells_ok,cells_failed\n";
  for (const auto& c : cells) {
    out << fmt::format("cell,{},{},{},{},", c.model, c.run, c.fold, c.ok ? "ok" : "failed");
    if (c.ok)
      out << formatValue(c.trainR2) << ',' << formatValue(c.testRmse) << ',' << formatValue(c.testR2);
    else
      out << ",,";
    out << ",,,,,\n";
  }
  for (const auto& a : aggregates) {
    out << fmt::format("aggregate,{},all,all,{},", a.model, a.okCells > 0 ? "ok" : "failed");
    out << formatValue(a.meanTrainR2) << ',' << formatValue(a.meanTestRmse) << ','
        << formatValue(a.meanTestR2) << ',' << formatValue(a.stdTrainR2) << ','
        << formatValue(a.stdTestRmse) << ',' << formatValue(a.stdTestR2) << ',' << a.okCells << ','
        << a.failedCells << '\n';
  }
}

void MetricsReport::writeTimingsCsv(std::ostream& out) const {
  out << "model,run,fold,wall_seconds\n";
  for (const auto& c : cells) out << fmt::format("{},{},{},{:.6f}\n", c.model, c.run, c.fold, c.seconds);
}

void MetricsReport::writeManifests(std::ostream& out) const {
  for (const auto& c : cells) {
    nlohmann::json j = {{"record", "cell"},
                        {"model", c.model},
                        {"run", c.run},
                        {"fold", c.fold},
                        {"seed", c.seed},
                        {"config_hash", c.configHash},
                        {"status", c.ok ? "ok" : "failed"}};
    if (!c.ok) j["error"] = c.error;
    if (c.manifest) j["training"] = c.manifest->toJson();
    j["volatile"] = {{"wall_seconds", c.seconds}};
    out << j.dump() << '\n';
  }
}

void MetricsReport::writeScatterCsv(std::ostream& out) const {
  std::vector<std::string> models;
  for (const auto& a : aggregates) models.push_back(a.model);
  for (std::size_t m = 0; m < models.size(); ++m)
    out << (m ? "," : "") << models[m] << "_predicted," << models[m] << "_actual";
  out << '\n';
  std::vector<std::vector<const CellResult*>> byModel(models.size());
  for (const auto& c : cells)
    for (std::size_t m = 0; m < models.size(); ++m)
      if (c.model == models[m]) byModel[m].push_back(&c);
  if (models.empty()) return;
  const std::size_t cellCount = byModel[0].size();
  for (std::size_t k = 0; k < cellCount; ++k) {
    const Index rows = byModel[0][k]->testTargets.size();
    for (Index r = 0; r < rows; ++r) {
      for (std::size_t m = 0; m < models.size(); ++m) {
        const CellResult& c = *byModel[m][k];
        out << (m ? "," : "") << formatValue(c.testPredictions(r)) << ',' << formatValue(c.testTargets(r));
      }
      out << '\n';
    }
  }
}

const AggregateRow& MetricsReport::aggregateFor(const std::string& model) const {
  for (const auto& a : aggregates)
    if (a.model == model) return a;
  throw std::out_of_range(fmt::format("no aggregate row for model '{}'", model));
}

bool MetricsReport::allFailed() const noexcept {
  for (const auto& c : cells)
    if (c.ok) return false;
  return true;
}

}  // namespace eelm::harness
