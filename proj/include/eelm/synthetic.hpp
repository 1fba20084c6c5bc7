#pragma once

// Synthetic regression sets standing in for a featurized structure corpus.
//
//   sinc1d     x ~ U[-10, 10],     y = sin(x)/x (1 at x = 0)
//   friedman1  x ~ U[0, 1]^10,     y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5
//   linear     x ~ U[0, 1]^3,      y = 1 + 2 x1 - 3 x2 + 0.5 x3
//
// plus N(0, noiseSigma^2) noise on y.

#include <cstdint>
#include <span>
#include <string_view>

#include "eelm/elm.hpp"

namespace eelm::harness {

enum class SyntheticKind { sinc1d, friedman1, linear };

SyntheticKind parseSyntheticKind(std::string_view name);
std::string_view toString(SyntheticKind kind) noexcept;

/// Noise-free response for one input row.
double syntheticTruth(SyntheticKind kind, std::span<const double> x);

elm::RegressionData syntheticDataset(SyntheticKind kind, Index sampleCount, double noiseSigma,
                                     std::uint64_t seed);

}  // namespace eelm::harness
