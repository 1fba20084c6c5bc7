#pragma once

#include "eelm/rng.hpp"
#include "eelm/types.hpp"

namespace eelm::opt {

/// Mantegna's construction of Levy-stable step lengths:
///   s = mu / |v|^(1/beta),  mu ~ N(0, sigma_mu^2),  v ~ N(0, 1)
/// with
///   sigma_mu = [ Gamma(1+beta) sin(pi beta / 2) / (Gamma((1+beta)/2) beta 2^((beta-1)/2)) ]^(1/beta).
/// The step-length density decays like |s|^-(1+beta).
class LevyStepSampler {
 public:
  explicit LevyStepSampler(double exponentBeta = 1.5, double scale = 1.0);

  static double mantegnaSigma(double exponentBeta);

  double exponent() const noexcept { return beta_; }
  double sigmaMu() const noexcept { return sigmaMu_; }
  double scale() const noexcept { return scale_; }

  /// One unscaled step from a numerator draw (already multiplied by sigma_mu)
  /// and a denominator draw.
  double stepFromDraws(double mu, double v) const noexcept;

  /// `dimension` independent steps, each multiplied by scale().
  Vector sample(Index dimension, Rng& rng) const;

 private:
  double beta_;
  double sigmaMu_;
  double scale_;
};

}  // namespace eelm::opt
