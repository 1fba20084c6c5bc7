#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "eelm/metrics.hpp"
#include "eelm/synthetic.hpp"
#include "eelm/trainer.hpp"

using namespace eelm;
using namespace eelm::train;
using elm::Activation;
using elm::RegressionData;

namespace {

RegressionData smallSinc(Index n = 60, std::uint64_t seed = 3) {
  return harness::syntheticDataset(harness::SyntheticKind::sinc1d, n, 0.05, seed);
}

TrainingRunConfig quickConfig(opt::OptimizerKind kind, std::uint64_t seed) {
  TrainingRunConfig c;
  c.hiddenNodes = 8;
  c.optimizer.kind = kind;
  c.optimizer.populationSize = 6;
  c.optimizer.maxIterations = 5;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("agent layout round trip") {
  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const AgentLayout layout{1 + static_cast<Index>(g() % 6), 1 + static_cast<Index>(g() % 9), g() % 2 == 0};
    Vector v(layout.dimension());
    for (Index i = 0; i < v.size(); ++i) v(i) = u(g);
    const auto model = layout.decode(opt::asSpan(v), Activation::sigmoid);
    CHECK(model.inputWeights.rows() == layout.hidden);
    CHECK(model.inputWeights.cols() == layout.inputs);
    CHECK(layout.encode(model) == v);
    CHECK(layout.decode(opt::asSpan(layout.encode(model)), Activation::sigmoid).inputWeights == model.inputWeights);
    if (!layout.includeBiases) CHECK(model.hiddenBiases.isZero());
  }
  const AgentLayout l{2, 3, true};
  Vector v(9);
  v << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const auto m = l.decode(opt::asSpan(v), Activation::tanh);
  CHECK(m.inputWeights(1, 0) == 3);
  CHECK(m.inputWeights(2, 1) == 6);
  CHECK(m.hiddenBiases(2) == 9);
  CHECK_THROWS_AS(l.decode(std::span<const double>(v.data(), 8), Activation::tanh), ShapeError);
}

TEST_CASE("agent fitness") {
  // Linear activation and an exactly linear target: the decoded model is exact.
  Matrix x(6, 1);
  x << 0, 1, 2, 3, 4, 5;
  const RegressionData data(x, (2.0 * x.col(0)).eval());
  const AgentLayout layout{1, 1, true};
  const std::vector<double> agent{0.5, 0.0};
  CHECK(agentFitness(agent, layout, Activation::linear, data.subset(std::vector<Index>{0, 1, 2}),
                     data.subset(std::vector<Index>{3, 4, 5}), 0.0) <= 1e-12);

  // Solve on a single point x=1 (t=1), weight 1, linear: beta = 1; predictions on
  // x = [1, 2] are [1, 2] versus targets [0, 2].
  Matrix xs(1, 1);
  xs << 1;
  Matrix xf(2, 1);
  xf << 1, 2;
  const std::vector<double> unit{1.0, 0.0};
  const double f = agentFitness(unit, layout, Activation::linear, RegressionData(xs, Vector::Ones(1)),
                                RegressionData(xf, Vector{{0.0, 2.0}}), 0.0);
  CHECK(f == doctest::Approx(0.7071067811865476).epsilon(1e-14));

  const auto d = smallSinc();
  const AgentLayout l8{1, 8, true};
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> a(static_cast<std::size_t>(l8.dimension()));
  for (double& v : a) v = u(g);
  const auto split = splitForFitness(d, 0.2, 4);
  const double fa = agentFitness(a, l8, Activation::sigmoid, split.solve, split.fitness, 0.0);
  const std::vector<double> b = a;
  CHECK(fa == agentFitness(b, l8, Activation::sigmoid, split.solve, split.fitness, 0.0));
  CHECK(std::isfinite(fa));

  std::vector<double> bad = a;
  bad[0] = std::nan("");
  CHECK(agentFitness(bad, l8, Activation::sigmoid, split.solve, split.fitness, 0.0) == INFINITY);
}

TEST_CASE("fitness split is a deterministic partition") {
  const auto d = smallSinc(50);
  const auto s = splitForFitness(d, 0.2, 9);
  CHECK(s.fitness.sampleCount() == 10);
  CHECK(s.solve.sampleCount() == 40);
  const auto t = splitForFitness(d, 0.2, 9);
  CHECK(s.fitness.inputs == t.fitness.inputs);
  std::vector<double> all;
  for (Index i = 0; i < 40; ++i) all.push_back(s.solve.inputs(i, 0));
  for (Index i = 0; i < 10; ++i) all.push_back(s.fitness.inputs(i, 0));
  std::vector<double> orig(d.inputs.data(), d.inputs.data() + 50);
  std::sort(all.begin(), all.end());
  std::sort(orig.begin(), orig.end());
  CHECK(all == orig);
  CHECK_THROWS_AS(splitForFitness(d, 1.0, 0), ConfigError);
}

TEST_CASE("degenerate optimisation returns the initial agent with its solve") {
  auto c = quickConfig(opt::OptimizerKind::randomSearch, 11);
  c.optimizer.populationSize = 1;
  c.optimizer.maxIterations = 0;
  const auto d = smallSinc();
  const auto r = train::train(d, c);
  CHECK(r.manifest.history.empty());
  CHECK(r.manifest.evaluations == 1);

  const AgentLayout layout{1, 8, true};
  const auto init = opt::initialPopulation(opt::Bounds::uniform(layout.dimension(), -1, 1), 1, streamSeed(11, {2}));
  auto expect = layout.decode(opt::rowSpan(init, 0), Activation::sigmoid);
  CHECK(r.model.inputWeights == expect.inputWeights);
  CHECK(r.model.hiddenBiases == expect.hiddenBiases);
  expect.outputWeights = elm::solveOutputWeights(elm::buildHiddenMatrix(expect, d.inputs), d.targets, 0.0);
  CHECK(r.model.outputWeights == expect.outputWeights);
}

TEST_CASE("training is reproducible and serial equals parallel") {
  const auto d = smallSinc();
  for (auto kind : {opt::OptimizerKind::mrfo, opt::OptimizerKind::mrfoLevy, opt::OptimizerKind::pso}) {
    auto c = quickConfig(kind, 21);
    const auto a = train::train(d, c);
    const auto b = train::train(d, c);
    CHECK(a.manifest.toJson() == b.manifest.toJson());
    CHECK(a.model.outputWeights == b.model.outputWeights);
    c.execution = Execution::serial;
    const auto s = train::train(d, c);
    CHECK(a.manifest.toJson().dump() == s.manifest.toJson().dump());
    CHECK(a.model.outputWeights == s.model.outputWeights);
  }
}

TEST_CASE("optimised fitness never exceeds the initial population best") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = train::train(smallSinc(80, seed), quickConfig(opt::OptimizerKind::mrfoLevy, seed));
    CHECK(r.manifest.bestFitness <= r.manifest.initialBestFitness);
    for (std::size_t t = 1; t < r.manifest.history.size(); ++t)
      CHECK(r.manifest.history[t] <= r.manifest.history[t - 1]);
  }
}

TEST_CASE("reported best fitness is reproduced by re-solving on the solve split") {
  const auto d = smallSinc(70, 6);
  const auto c = quickConfig(opt::OptimizerKind::mrfo, 6);
  const auto r = train::train(d, c);
  const auto split = splitForFitness(d, c.fitnessFraction, streamSeed(c.seed, {1}));
  const AgentLayout layout{1, c.hiddenNodes, true};
  const Vector agent = layout.encode(r.model);
  const double f = agentFitness(opt::asSpan(agent), layout, c.activation, split.solve, split.fitness, c.penalty);
  CHECK(std::abs(f - r.manifest.bestFitness) <= 1e-10);
}

TEST_CASE("penalty grid selection") {
  const auto d = smallSinc(70, 8);
  auto c = quickConfig(opt::OptimizerKind::mrfo, 8);
  c.penaltyGrid = {0.0, 1e-6, 1e-3, 1e3};
  const auto r = train::train(d, c);
  CHECK(std::find(c.penaltyGrid.begin(), c.penaltyGrid.end(), r.manifest.selectedPenalty) != c.penaltyGrid.end());
  CHECK(r.model.penalty == r.manifest.selectedPenalty);
  c.penaltyGrid = {-1.0};
  CHECK_THROWS_AS(train::train(d, c), ConfigError);
}

TEST_CASE("plain ELM") {
  const auto wide = harness::syntheticDataset(harness::SyntheticKind::friedman1, 20, 0.1, 1);
  const auto m = trainPlainElm(wide, 40, Activation::sigmoid, 0.0, 5);
  CHECK(harness::rmse(elm::predict(m, wide.inputs), wide.targets) <= 1e-6);
  const auto d = smallSinc(30, 1);
  CHECK(m.inputWeights.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(m.hiddenBiases.cwiseAbs().maxCoeff() <= 1.0);

  const auto ridge = trainPlainElm(d, 10, Activation::sigmoid, 1e6, 5);
  CHECK(ridge.outputWeights.norm() < 1e-3);
  CHECK(elm::predict(ridge, d.inputs).cwiseAbs().maxCoeff() < 1e-2);

  const auto a = trainPlainElm(d, 10, Activation::sigmoid, 0.0, 9);
  const auto b = trainPlainElm(d, 10, Activation::sigmoid, 0.0, 9);
  CHECK(a.inputWeights == b.inputWeights);
  CHECK(a.outputWeights == b.outputWeights);
  CHECK_THROWS_AS(trainPlainElm(d, 0, Activation::sigmoid, 0.0, 9), ConfigError);
}

TEST_CASE("config validation and hashing") {
  TrainingRunConfig c;
  CHECK(c.hiddenNodes == 300);
  CHECK((c.optimizer.kind == opt::OptimizerKind::mrfoLevy));
  CHECK(c.optimizer.populationSize == 20);
  CHECK(c.optimizer.maxIterations == 50);
  c.weightLower = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = TrainingRunConfig{};
  c.hiddenNodes = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  TrainingRunConfig x, y;
  y.hiddenNodes = 301;
  CHECK(hashJson(x.toJson()) != hashJson(y.toJson()));
  y = TrainingRunConfig{};
  y.seed = 1;
  CHECK(hashJson(x.toJson()) == hashJson(y.toJson()));
  CHECK(hashJson(x.toJson()) == hashJson(TrainingRunConfig{}.toJson()));
}
