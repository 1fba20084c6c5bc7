#include "eelm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace eelm::opt {

Bounds Bounds::uniform(Index dimension, double lo, double hi) {
  return Bounds{Vector::Constant(dimension, lo), Vector::Constant(dimension, hi)};
}

void Bounds::validate() const {
  if (lower.size() != upper.size())
    throw ShapeError(fmt::format("lower bound has length {} but upper bound has length {}",
                                 lower.size(), upper.size()));
  if (lower.size() < 1) throw ConfigError("search space needs at least one dimension");
  for (Index d = 0; d < lower.size(); ++d) {
    if (!std::isfinite(lower(d)) || !std::isfinite(upper(d)) || !(lower(d) < upper(d)))
      throw ConfigError(fmt::format("bounds must satisfy lower < upper (dimension {})", d));
  }
}

void Bounds::clamp(std::span<double> x) const noexcept {
  for (std::size_t d = 0; d < x.size(); ++d) {
    const auto i = static_cast<Index>(d);
    // NaN maps to the lower bound so a position can never leave the box.
    x[d] = std::isnan(x[d]) ? lower(i) : std::clamp(x[d], lower(i), upper(i));
  }
}

bool Bounds::contains(std::span<const double> x) const noexcept {
  if (static_cast<Index>(x.size()) != lower.size()) return false;
  for (std::size_t d = 0; d < x.size(); ++d) {
    const auto i = static_cast<Index>(d);
    if (!(x[d] >= lower(i) && x[d] <= upper(i))) return false;
  }
  return true;
}

Vector Bounds::sample(Rng& rng) const {
  Vector x(lower.size());
  for (Index d = 0; d < x.size(); ++d) x(d) = lower(d) + rng.uniform() * (upper(d) - lower(d));
  clamp(asSpan(x));
  return x;
}

double sanitizeFitness(double value) noexcept {
  return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
}

void evaluatePopulation(const Objective& objective, const PositionMatrix& positions,
                        std::span<double> fitness, Execution exec) {
  const Index n = positions.rows();
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel && n > 1)
  for (Index i = 0; i < n; ++i) {
    double f;
    try {
      f = objective(rowSpan(positions, i));
    } catch (...) {
      f = std::numeric_limits<double>::infinity();
    }
    fitness[static_cast<std::size_t>(i)] = sanitizeFitness(f);
  }
}

bool updateBest(const PositionMatrix& positions, std::span<const double> fitness,
                Vector& bestPosition, double& bestFitness) {
  bool changed = false;
  for (std::size_t i = 0; i < fitness.size(); ++i) {
    if (fitness[i] < bestFitness) {
      bestFitness = fitness[i];
      bestPosition = positions.row(static_cast<Index>(i)).transpose();
      changed = true;
    }
  }
  return changed;
}

PositionMatrix initialPopulation(const Bounds& bounds, int populationSize, std::uint64_t seed) {
  PositionMatrix pop(populationSize, bounds.dimension());
  for (int i = 0; i < populationSize; ++i) {
    Rng rng = Rng::stream(seed, {kInitStream, static_cast<std::uint64_t>(i)});
    pop.row(i) = bounds.sample(rng).transpose();
  }
  return pop;
}

}  // namespace eelm::opt
