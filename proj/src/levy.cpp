#include "eelm/levy.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace eelm::opt {

LevyStepSampler::LevyStepSampler(double exponentBeta, double scale)
    : beta_(exponentBeta), sigmaMu_(mantegnaSigma(exponentBeta)), scale_(scale) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ConfigError(fmt::format("Levy step scale must be > 0, got {}", scale));
}

double LevyStepSampler::mantegnaSigma(double beta) {
  if (!(beta > 0.0 && beta <= 2.0))
    throw ConfigError(fmt::format("Levy exponent must lie in (0, 2], got {}", beta));
  const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
  const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, (beta - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / beta);
}

double LevyStepSampler::stepFromDraws(double mu, double v) const noexcept {
  return mu / std::pow(std::abs(v), 1.0 / beta_);
}

Vector LevyStepSampler::sample(Index dimension, Rng& rng) const {
  Vector s(dimension);
  for (Index d = 0; d < dimension; ++d) {
    const double mu = sigmaMu_ * rng.normal();
    double v = rng.normal();
    while (std::abs(v) < 1e-300) v = rng.normal();
    s(d) = scale_ * stepFromDraws(mu, v);
  }
  return s;
}

}  // namespace eelm::opt
