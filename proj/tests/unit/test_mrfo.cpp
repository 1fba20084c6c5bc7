#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "../support/oracles.hpp"
#include "eelm/mrfo.hpp"
#include "eelm/test_functions.hpp"

using namespace eelm;
using namespace eelm::opt;

namespace {

SwarmState state1(std::vector<double> xs, double best, int t = 1, int T = 50) {
  SwarmState s;
  s.positions.resize(static_cast<Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) s.positions(static_cast<Index>(i), 0) = xs[i];
  s.bestPosition = Vector::Constant(1, best);
  s.iteration = t;
  s.maxIterations = T;
  return s;
}

SwarmState collapsed(Index n, const Vector& p) {
  SwarmState s;
  s.positions = p.transpose().replicate(n, 1);
  s.bestPosition = p;
  s.iteration = 3;
  s.maxIterations = 10;
  return s;
}

std::span<const double> one(const double& v) { return {&v, 1}; }

MrfoConfig sphereConfig(std::uint64_t seed, Index dim = 2) {
  MrfoConfig c;
  c.bounds = Bounds::uniform(dim, -1, 1);
  c.seed = seed;
  return c;
}

double sigmaOracle(double b) {
  using boost::math::tgamma;
  const double num = tgamma(1 + b) * std::sin(std::numbers::pi * b / 2);
  const double den = tgamma((1 + b) / 2) * b * std::pow(2.0, (b - 1) / 2);
  return std::pow(num / den, 1 / b);
}

}  // namespace

TEST_CASE("chain foraging: hand-evaluated step, fixed point, clamp") {
  const auto bounds = Bounds::uniform(1, -10, 10);
  const double r = 0.25;
  CHECK(chainCoefficient(r) == doctest::Approx(0.5887050112577373).epsilon(1e-14));
  CHECK(chainUpdate(state1({0.0}, 1.0), 0, one(r), bounds)(0) ==
        doctest::Approx(0.8387050112577373).epsilon(1e-14));
  CHECK(chainCoefficient(0.0) == 0.0);

  // i >= 1 pulls towards the predecessor.
  const auto s = state1({0.2, -0.4}, 0.5);
  const double a = chainCoefficient(r);
  CHECK(chainUpdate(s, 1, one(r), bounds)(0) ==
        doctest::Approx(0.2 + r * (0.2 + 0.4) + a * (0.5 + 0.4)).epsilon(1e-14));

  const auto unit = Bounds::uniform(1, -1, 1);
  const double big = 0.9;
  CHECK(chainUpdate(state1({0.8}, 1.0), 0, one(big), unit)(0) == 1.0);

  std::mt19937_64 g(1);
  std::uniform_real_distribution<double> u(0, 1);
  const Vector p{{0.3, -0.7, 0.1}};
  const auto c = collapsed(5, p);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> rs{u(g), u(g), u(g)};
    for (Index i = 0; i < 5; ++i) CHECK(chainUpdate(c, i, rs, Bounds::uniform(3, -1, 1)) == p);
  }
}

TEST_CASE("cyclone foraging: hand-evaluated step, fixed point, zero coefficient") {
  const double r = 0.5, r1 = 0.25;
  const double beta = cycloneCoefficient(r1, 1, 50);
  CHECK(beta == doctest::Approx(2.568050833375483).epsilon(1e-14));
  const auto wide = Bounds::uniform(1, -10, 10);
  const Vector ref = Vector::Constant(1, 1.0);
  CHECK(cycloneUpdate(state1({0.0}, 1.0), 0, ref, one(r), one(r1), wide)(0) ==
        doctest::Approx(1 + 0.5 + 2.568050833375483).epsilon(1e-14));
  CHECK(cycloneUpdate(state1({0.0}, 1.0), 0, ref, one(r), one(r1), Bounds::uniform(1, -1, 1))(0) == 1.0);

  CHECK(cycloneCoefficient(0.0, 50, 50) == 0.0);
  const auto s = state1({0.3, -0.2}, 0.0, 50, 50);
  const Vector ref2 = Vector::Constant(1, 0.1);
  const double zero = 0.0;
  CHECK(cycloneUpdate(s, 1, ref2, one(r), one(zero), wide)(0) ==
        doctest::Approx(0.1 + 0.5 * (0.3 + 0.2)).epsilon(1e-14));

  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(0, 1);
  const Vector p{{-0.5, 0.25}};
  const auto c = collapsed(4, p);
  for (int trial = 0; trial < 50; ++trial) {
    const std::vector<double> a{u(g), u(g)}, b{u(g), u(g)};
    for (Index i = 0; i < 4; ++i)
      CHECK(cycloneUpdate(c, i, p, a, b, Bounds::uniform(2, -1, 1)) == p);
  }
}

TEST_CASE("somersault: hand-evaluated step, fixed points") {
  const auto unit = Bounds::uniform(1, -1, 1);
  const double r2 = 1.0, r3 = 0.0;
  CHECK(somersaultUpdate(state1({0.5}, 0.5), 0, 2.0, one(r2), one(r3), Bounds::uniform(1, -5, 5))(0) == 1.5);
  CHECK(somersaultUpdate(state1({0.5}, 0.5), 0, 2.0, one(r2), one(r3), unit)(0) == 1.0);

  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double a = u(g), b = u(g);
    CHECK(somersaultUpdate(state1({0.0}, 0.0), 0, 2.0, one(a), one(b), unit)(0) == 0.0);
    CHECK(somersaultUpdate(state1({0.4}, 0.4), 0, 2.0, one(a), one(a), unit)(0) ==
          doctest::Approx(0.4).epsilon(1e-15));
  }
}

TEST_CASE("kernels reject bad indices and draw counts") {
  const auto s = state1({0.0, 0.1}, 0.0);
  const double r = 0.5;
  CHECK_THROWS_AS(chainUpdate(s, 2, one(r), Bounds::uniform(1, -1, 1)), std::out_of_range);
  CHECK_THROWS_AS(chainUpdate(s, -1, one(r), Bounds::uniform(1, -1, 1)), std::out_of_range);
  const std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS(chainUpdate(s, 0, two, Bounds::uniform(1, -1, 1)), ShapeError);
}

TEST_CASE("Levy sampler: Mantegna sigma against an independent gamma oracle") {
  CHECK(std::abs(LevyStepSampler::mantegnaSigma(1.5) - 0.696575) <= 1e-6);
  CHECK(std::abs(LevyStepSampler::mantegnaSigma(1.5) - 0.6965745025576968) <= 1e-12);
  for (double b : {0.3, 0.5, 1.0, 1.2, 1.5, 1.8, 1.99, 2.0}) {
    const LevyStepSampler s(b);
    CHECK(std::abs(s.sigmaMu() - sigmaOracle(b)) <= 1e-12 * std::max(1.0, sigmaOracle(b)));
  }
  CHECK_THROWS_AS(LevyStepSampler(0.0), ConfigError);
  CHECK_THROWS_AS(LevyStepSampler(2.5), ConfigError);
  CHECK_THROWS_AS(LevyStepSampler(1.5, 0.0), ConfigError);
}

TEST_CASE("Levy sampler: zero numerator, scaling, heavy tail") {
  const LevyStepSampler s(1.5);
  CHECK(s.stepFromDraws(0.0, 0.3) == 0.0);
  CHECK(s.stepFromDraws(0.5, 1.0) == 0.5);
  CHECK(std::isfinite(s.stepFromDraws(1.0, 1e-320)));

  Rng a = Rng::stream(9, {1}), b = Rng::stream(9, {1});
  const Vector unit = LevyStepSampler(1.5, 1.0).sample(6, a);
  const Vector scaled = LevyStepSampler(1.5, 0.01).sample(6, b);
  CHECK((unit * 0.01 - scaled).cwiseAbs().maxCoeff() <= 1e-15 * unit.cwiseAbs().maxCoeff());

  Rng rng = Rng::stream(2024, {7});
  const Vector x = s.sample(100000, rng);
  REQUIRE(x.allFinite());
  const double m = x.mean();
  const double m2 = (x.array() - m).square().mean();
  const double m4 = (x.array() - m).pow(4).mean();
  CHECK(m4 / (m2 * m2) - 3.0 > 10.0);
  std::vector<double> absx(x.data(), x.data() + x.size());
  for (double& v : absx) v = std::abs(v);
  std::nth_element(absx.begin(), absx.begin() + absx.size() / 2, absx.end());
  const double median = absx[absx.size() / 2];
  CHECK(x.cwiseAbs().maxCoeff() / median > 100.0);
}

TEST_CASE("Levy walk: identity composition, zero step, clamp") {
  const auto unit = Bounds::uniform(2, -1, 1);
  const std::vector<double> pos{0.0, 0.0}, plus{1.0, 1.0}, step{0.1, -0.2}, zero{0.0, 0.0};
  const Vector out = levyWalkUpdate(pos, 1.0, plus, step, unit);
  CHECK(out(0) == 0.1);
  CHECK(out(1) == -0.2);
  const std::vector<double> p2{0.3, -0.6};
  CHECK(levyWalkUpdate(p2, 0.7, plus, zero, unit) == Vector{{0.3, -0.6}});
  const std::vector<double> p1{0.95}, s1{0.3}, one1{1.0};
  CHECK(levyWalkUpdate(p1, 1.0, one1, s1, Bounds::uniform(1, -1, 1))(0) == 1.0);
}

TEST_CASE("minimize: degenerate loop and constant objective") {
  MrfoConfig c = sphereConfig(5);
  c.populationSize = 1;
  c.maxIterations = 0;
  Vector seen;
  const auto res = minimize(
      [&](std::span<const double> x) {
        seen = Vector::Map(x.data(), static_cast<Index>(x.size()));
        return oracle::sphere(x);
      },
      c);
  CHECK(res.history.empty());
  CHECK(res.bestPosition == seen);
  CHECK(res.bestFitness == oracle::sphere(asSpan(seen)));
  CHECK(res.bestFitness == res.initialBestFitness);
  CHECK(res.evaluations == 1);

  MrfoConfig k = sphereConfig(6, 3);
  k.levyEnabled = true;
  const auto flat = minimize([](std::span<const double>) { return 7.0; }, k);
  CHECK(flat.bestFitness == 7.0);
  CHECK(flat.history.size() == 50);
  CHECK(std::all_of(flat.history.begin(), flat.history.end(), [](double v) { return v == 7.0; }));
  CHECK(flat.evaluations == 20 + 2 * 20 * 50);
}

TEST_CASE("minimize: sphere converges in at least 18 of 20 seeds") {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed)
    ok += minimize(oracle::sphere, sphereConfig(seed)).bestFitness <= 1e-3;
  CHECK(ok >= 18);
}

TEST_CASE("minimize: monotone history, feasibility, reproducibility over random configs") {
  std::mt19937_64 g(77);
  const char* names[] = {"sphere", "rastrigin", "rosenbrock"};
  for (int trial = 0; trial < 25; ++trial) {
    const auto fn = benchmarkFunction(names[trial % 3]);
    MrfoConfig c;
    const Index dim = 1 + static_cast<Index>(g() % 6);
    c.bounds = Bounds::uniform(dim, fn.lower, fn.upper);
    c.populationSize = 1 + static_cast<int>(g() % 12);
    c.maxIterations = 1 + static_cast<int>(g() % 15);
    c.levyEnabled = g() % 2;
    c.seed = g();

    bool feasible = true;
    int snapshots = 0;
    auto watch = [&](const PhaseSnapshot& snap) {
      ++snapshots;
      for (Index i = 0; i < snap.positions.rows(); ++i) feasible &= c.bounds.contains(rowSpan(snap.positions, i));
    };
    const auto a = minimize(fn.objective, c, watch);
    CHECK(feasible);
    CHECK(snapshots == 1 + 2 * c.maxIterations);
    REQUIRE(a.history.size() == static_cast<std::size_t>(c.maxIterations));
    CHECK(a.history.front() <= a.initialBestFitness);
    for (std::size_t t = 1; t < a.history.size(); ++t) CHECK(a.history[t] <= a.history[t - 1]);
    CHECK(a.bestFitness == a.history.back());
    CHECK(c.bounds.contains(asSpan(a.bestPosition)));

    const auto b = minimize(fn.objective, c);
    CHECK(a.history == b.history);
    CHECK(a.bestPosition == b.bestPosition);

    c.execution = Execution::serial;
    const auto s = minimize(fn.objective, c);
    CHECK(a.history == s.history);
    CHECK(a.bestPosition == s.bestPosition);
  }
}

TEST_CASE("minimize: Levy off matches the sequential reference implementation") {
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 10; ++trial) {
    MrfoConfig c;
    const Index dim = 1 + static_cast<Index>(g() % 5);
    c.bounds = Bounds::uniform(dim, -5.12, 5.12);
    c.populationSize = 2 + static_cast<int>(g() % 10);
    c.maxIterations = 1 + static_cast<int>(g() % 20);
    c.seed = g();
    std::vector<PositionMatrix> after;
    const auto res = minimize(oracle::rastrigin, c, [&](const PhaseSnapshot& s) {
      if (s.phase == "somersault") after.push_back(s.positions);
    });
    const auto ref = oracle::referenceMrfo(oracle::rastrigin, c);
    CHECK(res.history == ref.history);
    CHECK(res.bestPosition == ref.best);
    REQUIRE(after.size() == ref.positionsAfterIteration.size());
    for (std::size_t t = 0; t < after.size(); ++t) CHECK(Matrix(after[t]) == ref.positionsAfterIteration[t]);
  }
}

TEST_CASE("minimize: Levy walk changes trajectories but not the forage stream") {
  MrfoConfig c = sphereConfig(4, 3);
  std::vector<PositionMatrix> plain, levy;
  minimize(oracle::sphere, c, [&](const PhaseSnapshot& s) {
    if (s.iteration == 1) plain.push_back(s.positions);
  });
  c.levyEnabled = true;
  minimize(oracle::sphere, c, [&](const PhaseSnapshot& s) {
    if (s.iteration == 1) levy.push_back(s.positions);
  });
  REQUIRE(plain.size() == 2);
  REQUIRE(levy.size() == 2);
  CHECK(plain[0] == levy[0]);
  CHECK(plain[1] != levy[1]);
}

TEST_CASE("minimize: non-finite objective values never become best") {
  MrfoConfig c = sphereConfig(8);
  const auto res = minimize(
      [](std::span<const double> x) {
        if (x[0] > 0) return std::numeric_limits<double>::quiet_NaN();
        return oracle::sphere(x);
      },
      c);
  CHECK(std::isfinite(res.bestFitness));
  CHECK(res.bestPosition(0) <= 0.0);

  const auto allBad = minimize([](std::span<const double>) { return INFINITY; }, c);
  CHECK(allBad.bestFitness == INFINITY);
  CHECK(allBad.history.size() == 50);

  const auto throwing = minimize(
      [](std::span<const double> x) -> double {
        if (x[1] > 0.5) throw std::runtime_error("boom");
        return oracle::sphere(x);
      },
      c);
  CHECK(std::isfinite(throwing.bestFitness));
}

TEST_CASE("config validation") {
  MrfoConfig c = sphereConfig(1);
  c.populationSize = 0;
  CHECK_THROWS_AS(minimize(oracle::sphere, c), ConfigError);
  c = sphereConfig(1);
  c.bounds.upper(1) = -1;
  CHECK_THROWS_AS(minimize(oracle::sphere, c), ConfigError);
  c = sphereConfig(1);
  c.somersaultFactor = 0;
  CHECK_THROWS_AS(minimize(oracle::sphere, c), ConfigError);
  c = sphereConfig(1);
  c.levyExponentBeta = 2.01;
  CHECK_THROWS_AS(minimize(oracle::sphere, c), ConfigError);
  c = sphereConfig(1);
  CHECK(c.resolvedLevyScale() == doctest::Approx(0.02));
}
