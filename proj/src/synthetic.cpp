#include "eelm/synthetic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "eelm/rng.hpp"

namespace eelm::harness {

SyntheticKind parseSyntheticKind(std::string_view name) {
  if (name == "sinc1d") return SyntheticKind::sinc1d;
  if (name == "friedman1") return SyntheticKind::friedman1;
  if (name == "linear") return SyntheticKind::linear;
  throw ConfigError(fmt::format("unknown synthetic dataset '{}'", name));
}

std::string_view toString(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::sinc1d: return "sinc1d";
    case SyntheticKind::friedman1: return "friedman1";
    case SyntheticKind::linear: return "linear";
  }
  return "?";
}

namespace {

Index inputCount(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::sinc1d: return 1;
    case SyntheticKind::friedman1: return 10;
    case SyntheticKind::linear: return 3;
  }
  return 1;
}

}  // namespace

double syntheticTruth(SyntheticKind kind, std::span<const double> x) {
  if (static_cast<Index>(x.size()) != inputCount(kind))
    throw ShapeError(fmt::format("{} expects {} inputs, got {}", toString(kind), inputCount(kind), x.size()));
  switch (kind) {
    case SyntheticKind::sinc1d:
      return x[0] == 0.0 ? 1.0 : std::sin(x[0]) / x[0];
    case SyntheticKind::friedman1:
      return 10.0 * std::sin(std::numbers::pi * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
             10.0 * x[3] + 5.0 * x[4];
    case SyntheticKind::linear:
      return 1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2];
  }
  return 0.0;
}

elm::RegressionData syntheticDataset(SyntheticKind kind, Index sampleCount, double noiseSigma,
                                     std::uint64_t seed) {
  if (sampleCount < 1) throw ConfigError("synthetic dataset needs at least one sample");
  if (!(noiseSigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  const Index n = inputCount(kind);
  Rng rng(streamSeed(seed, {0x5717ULL, static_cast<std::uint64_t>(kind)}));
  Matrix x(sampleCount, n);
  Vector t(sampleCount);
  std::vector<double> row(static_cast<std::size_t>(n));
  for (Index p = 0; p < sampleCount; ++p) {
    for (Index d = 0; d < n; ++d) {
      row[static_cast<std::size_t>(d)] = kind == SyntheticKind::sinc1d ? rng.uniform(-10.0, 10.0) : rng.uniform();
      x(p, d) = row[static_cast<std::size_t>(d)];
    }
    const double noise = rng.normal();
    t(p) = syntheticTruth(kind, row) + noiseSigma * noise;
  }
  return elm::RegressionData(std::move(x), std::move(t));
}

}  // namespace eelm::harness
