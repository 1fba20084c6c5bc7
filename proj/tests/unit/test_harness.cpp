#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "eelm/dataset.hpp"
#include "eelm/folds.hpp"
#include "eelm/metrics.hpp"
#include "eelm/protocol.hpp"
#include "eelm/rdf.hpp"
#include "eelm/synthetic.hpp"

using namespace eelm;
using namespace eelm::harness;

namespace {

std::vector<ModelEntry> quickModels() {
  PlainElmConfig plain;
  plain.hiddenNodes = 10;
  train::TrainingRunConfig evo;
  evo.hiddenNodes = 6;
  evo.optimizer.kind = opt::OptimizerKind::mrfoLevy;
  evo.optimizer.populationSize = 4;
  evo.optimizer.maxIterations = 3;
  return {{"elm", plain}, {"eelm", evo}};
}

std::string csvOf(const MetricsReport& r) {
  std::ostringstream s;
  r.writeCsv(s);
  return s.str();
}

std::size_t lineCount(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("folds: partition, balance, determinism") {
  FoldPlan plan;
  const auto ten = makeFolds(10, plan, 0);
  REQUIRE(ten.size() == 5);
  std::set<Index> seen;
  for (const auto& f : ten) {
    CHECK(f.test.size() == 2);
    CHECK(f.train.size() == 8);
    for (Index i : f.test) CHECK(seen.insert(i).second);
  }
  CHECK(seen.size() == 10);

  for (std::uint64_t seed = 0; seed < 10; ++seed)
    for (int run = 0; run < 5; ++run)
      for (Index n : {5, 7, 23, 64, 101}) {
        FoldPlan p;
        p.masterSeed = seed;
        p.foldCount = 2 + static_cast<int>((seed + run) % 4);
        const auto folds = makeFolds(n, p, run);
        std::vector<int> hits(static_cast<std::size_t>(n), 0);
        std::size_t lo = SIZE_MAX, hi = 0;
        for (const auto& f : folds) {
          lo = std::min(lo, f.test.size());
          hi = std::max(hi, f.test.size());
          CHECK(std::is_sorted(f.test.begin(), f.test.end()));
          CHECK(f.train.size() + f.test.size() == static_cast<std::size_t>(n));
          std::vector<Index> both;
          std::set_intersection(f.train.begin(), f.train.end(), f.test.begin(), f.test.end(),
                                std::back_inserter(both));
          CHECK(both.empty());
          for (Index i : f.test) ++hits[static_cast<std::size_t>(i)];
        }
        CHECK(hi - lo <= 1);
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
      }

  FoldPlan p;
  p.masterSeed = 12;
  CHECK(foldPermutation(100, p, 3) == foldPermutation(100, p, 3));
  CHECK(foldPermutation(100, p, 3) != foldPermutation(100, p, 4));
  CHECK_THROWS_AS(makeFolds(4, plan, 0), ConfigError);
  p.foldCount = 1;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("metrics: spec values and identities") {
  const std::vector<double> a{1, 2}, b{0, 2};
  CHECK(rmse(a, a) == 0.0);
  CHECK(rmse(a, b) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  const std::vector<double> t{0, 1, 2}, y{0, 1, 3}, m{1, 1, 1};
  CHECK(rSquared(y, t) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rSquared(t, t) == 1.0);
  CHECK(rSquared(m, t) == 0.0);
  const std::vector<double> flat{2, 2, 2};
  CHECK_THROWS_AS(rSquared(t, flat), NumericalError);
  CHECK_THROWS_AS(rmse(a, t), ShapeError);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), ShapeError);

  std::mt19937_64 g(3);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const Index len = 1 + static_cast<Index>(g() % 40);
    Vector p(len), q(len);
    for (Index i = 0; i < len; ++i) {
      p(i) = n(g);
      q(i) = n(g);
    }
    const double c = n(g), s = 3 * n(g);
    CHECK(rmse(Vector(q.array() + c), q) == doctest::Approx(std::abs(c)).epsilon(1e-12));
    CHECK(rmse(Vector(s * p), Vector(s * q)) == doctest::Approx(std::abs(s) * rmse(p, q)).epsilon(1e-12));
    CHECK(rmse(p, q) >= 0.0);
    if (len > 1) CHECK(rSquared(p, q) <= 1.0);
  }
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(mean(v) == 2.5);
  CHECK(stddev(v) == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stddev(std::vector<double>{4.0}) == 0.0);
}

TEST_CASE("synthetic data") {
  const auto lin = syntheticDataset(SyntheticKind::linear, 50, 0.0, 1);
  for (Index i = 0; i < 50; ++i) {
    const auto x = lin.inputs.row(i);
    CHECK(lin.targets(i) == doctest::Approx(1 + 2 * x(0) - 3 * x(1) + 0.5 * x(2)).epsilon(1e-14));
  }
  const auto a = syntheticDataset(SyntheticKind::friedman1, 30, 0.1, 5);
  const auto b = syntheticDataset(SyntheticKind::friedman1, 30, 0.1, 5);
  CHECK(a.inputs == b.inputs);
  CHECK(a.targets == b.targets);
  CHECK(a.featureCount() == 10);
  CHECK(a.inputs.minCoeff() >= 0.0);
  CHECK(a.inputs.maxCoeff() < 1.0);

  const auto s = syntheticDataset(SyntheticKind::sinc1d, 10000, 0.05, 2);
  Vector resid(10000);
  for (Index i = 0; i < 10000; ++i) {
    const double x = s.inputs(i, 0);
    CHECK(std::abs(x) <= 10.0);
    resid(i) = s.targets(i) - syntheticTruth(SyntheticKind::sinc1d, std::span<const double>(&x, 1));
  }
  const double sd = stddev(std::span<const double>(resid.data(), 10000));
  CHECK(sd >= 0.045);
  CHECK(sd <= 0.055);
  const double zero = 0.0;
  CHECK(syntheticTruth(SyntheticKind::sinc1d, std::span<const double>(&zero, 1)) == 1.0);
  CHECK_THROWS_AS(parseSyntheticKind("moons"), ConfigError);
  CHECK_THROWS_AS(syntheticDataset(SyntheticKind::linear, 0, 0.0, 1), ConfigError);
}

TEST_CASE("feature CSV reading and min-max scaling") {
  std::istringstream in("a,b,target\n1,2,3\n4,5,6\n");
  const auto d = readFeatureCsv(in);
  CHECK(d.featureNames == std::vector<std::string>{"a", "b"});
  CHECK(d.data.sampleCount() == 2);
  CHECK(d.data.targets(1) == 6);

  rdf::RdfConfig cfg;
  cfg.speciesPairs = {{"Li", "Li"}};
  cfg.gridPoints = 4;
  const rdf::CrystalStructure li(Eigen::Matrix3d::Identity() * 3.0, {{"Li", {0, 0, 0}}}, -1.9);
  const auto ds = rdf::featurize({li, li}, cfg, rdf::FormationReference{"Li", "Ge", -1.9, -4.5});
  std::ostringstream csv;
  ds.writeCsv(csv);
  std::istringstream back(csv.str());
  const auto re = readFeatureCsv(back);
  CHECK(re.data.inputs == ds.features);
  CHECK(re.data.targets == *ds.targets);

  auto lineOf = [](const char* text) {
    std::istringstream is(text);
    try {
      readFeatureCsv(is);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(lineOf("a,b\n1,2\n") == 1);
  CHECK(lineOf("a,target\n1,2\n3\n") == 3);
  CHECK(lineOf("a,target\n1,x\n") == 2);
  CHECK(lineOf("") == 1);

  Matrix x(3, 2);
  x << 0, 5, 2, 5, 4, 5;
  const auto sc = MinMaxScaler::fit(x);
  const Matrix z = sc.transform(x);
  CHECK(z(1, 0) == 0.5);
  CHECK(z.col(1).isZero());
  Matrix outside(1, 2);
  outside << 8, 7;
  CHECK(sc.transform(outside)(0, 0) == 2.0);
}

TEST_CASE("protocol bookkeeping") {
  const auto data = syntheticDataset(SyntheticKind::sinc1d, 30, 0.05, 1);
  FoldPlan plan;
  plan.foldCount = 2;
  plan.runCount = 1;
  const auto report = runProtocol(data, {quickModels()[0]}, plan);
  CHECK(report.cells.size() == 2);
  CHECK(report.aggregates.size() == 1);
  CHECK(report.aggregateFor("elm").okCells == 2);

  plan.foldCount = 3;
  plan.runCount = 2;
  const auto two = runProtocol(data, quickModels(), plan);
  CHECK(two.cells.size() == 12);
  const std::string csv = csvOf(two);
  CHECK(lineCount(csv) == 1 + 12 + 2);
  std::ostringstream scatter;
  two.writeScatterCsv(scatter);
  CHECK(lineCount(scatter.str()) == 1 + 2 * 30);
  CHECK(scatter.str().rfind("elm_predicted,elm_actual,eelm_predicted,eelm_actual\n", 0) == 0);
  std::ostringstream manifests;
  two.writeManifests(manifests);
  CHECK(lineCount(manifests.str()) == 12);
  CHECK(manifests.str().find("\"volatile\"") != std::string::npos);

  for (const auto& c : two.cells) {
    CHECK(c.ok);
    CHECK(c.trainR2 <= 1.0);
    CHECK(c.testR2 <= 1.0);
    CHECK(c.testRmse >= 0.0);
  }
  // Paired seeds across models.
  CHECK(two.cells[0].seed == two.cells[6].seed);
  CHECK(two.cells[0].seed == cellSeed(0, 0, 0));
}

TEST_CASE("protocol: identical model configs give identical aggregates; serial and parallel agree") {
  const auto data = syntheticDataset(SyntheticKind::friedman1, 40, 0.1, 2);
  FoldPlan plan;
  plan.foldCount = 2;
  plan.runCount = 2;
  plan.masterSeed = 99;
  auto models = quickModels();
  auto twin = models[1];
  twin.name = "eelm_twin";
  models.push_back(twin);
  ProtocolOptions serial;
  serial.jobs = 1;
  const auto a = runProtocol(data, models, plan, serial);
  const auto& x = a.aggregateFor("eelm");
  const auto& y = a.aggregateFor("eelm_twin");
  CHECK(x.meanTestRmse == y.meanTestRmse);
  CHECK(x.stdTestRmse == y.stdTestRmse);
  CHECK(x.meanTestR2 == y.meanTestR2);

  CHECK(csvOf(a) == csvOf(runProtocol(data, models, plan, serial)));
  ProtocolOptions par;
  par.jobs = 4;
  const auto b = runProtocol(data, models, plan, par);
  CHECK(csvOf(a) == csvOf(b));
  for (std::size_t m = 0; m < a.aggregates.size(); ++m)
    CHECK(std::abs(a.aggregates[m].meanTestRmse - b.aggregates[m].meanTestRmse) <= 1e-12);

  models.push_back(models[0]);
  CHECK_THROWS_AS(runProtocol(data, models, plan), ConfigError);
}

TEST_CASE("protocol: failing cells are recorded, not fatal") {
  // Constant targets make R^2 undefined, so every cell fails.
  const elm::RegressionData flat(Matrix::Random(12, 2), Vector::Constant(12, 3.0));
  FoldPlan plan;
  plan.foldCount = 3;
  plan.runCount = 1;
  const auto r = runProtocol(flat, {quickModels()[0]}, plan);
  CHECK(r.allFailed());
  CHECK(r.aggregateFor("elm").failedCells == 3);
  CHECK_FALSE(r.cells[0].error.empty());
  const std::string csv = csvOf(r);
  CHECK(csv.find("cell,elm,0,0,failed") != std::string::npos);
  CHECK(csv.find("aggregate,elm,all,all,failed") != std::string::npos);
  std::ostringstream scatter;
  r.writeScatterCsv(scatter);
  CHECK(lineCount(scatter.str()) == 13);
}

TEST_CASE("target scale multiplies RMSE and scatter values") {
  const auto data = syntheticDataset(SyntheticKind::linear, 40, 0.1, 3);
  FoldPlan plan;
  plan.runCount = 1;
  ProtocolOptions o;
  const auto a = runProtocol(data, {quickModels()[0]}, plan, o);
  o.targetScale = 1000;
  const auto b = runProtocol(data, {quickModels()[0]}, plan, o);
  CHECK(b.aggregates[0].meanTestRmse == doctest::Approx(1000 * a.aggregates[0].meanTestRmse).epsilon(1e-12));
  CHECK(b.aggregates[0].meanTestR2 == a.aggregates[0].meanTestR2);
  CHECK(b.cells[0].testTargets(0) == doctest::Approx(1000 * a.cells[0].testTargets(0)));
}
