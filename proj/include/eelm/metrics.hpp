#pragma once

#include <span>
#include <vector>

#include "eelm/types.hpp"

namespace eelm::harness {

/// sqrt(mean((y - t)^2)). Throws ShapeError on length mismatch or empty input.
double rmse(std::span<const double> predictions, std::span<const double> targets);
double rmse(const Vector& predictions, const Vector& targets);

/// 1 - SS_res / SS_tot. Throws NumericalError when the targets have zero variance.
double rSquared(std::span<const double> predictions, std::span<const double> targets);
double rSquared(const Vector& predictions, const Vector& targets);

/// Pairwise (cascade) summation; its result does not depend on how the
/// caller partitioned the work that produced the values.
double pairwiseSum(std::span<const double> values) noexcept;
double mean(std::span<const double> values);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> values);

}  // namespace eelm::harness
