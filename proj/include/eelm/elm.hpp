#pragma once

// Single-hidden-layer feedforward network trained the ELM way: hidden
// parameters are given, output weights come from a least-squares solve.

#include <span>
#include <string_view>
#include <vector>

#include "eelm/types.hpp"

namespace eelm::elm {

enum class Activation { sigmoid, tanh, linear };

Activation parseActivation(std::string_view name);
std::string_view toString(Activation a) noexcept;

/// Logistic sigmoid with the argument clamped to [-500, 500].
double sigmoid(double z) noexcept;
double activate(Activation a, double z) noexcept;

struct ElmModel {
  Matrix inputWeights;   // M x N, one row per hidden node
  Vector hiddenBiases;   // M
  Vector outputWeights;  // M
  Activation activation = Activation::sigmoid;
  double penalty = 0.0;

  Index hiddenCount() const noexcept { return inputWeights.rows(); }
  Index inputCount() const noexcept { return inputWeights.cols(); }

  /// Throws ShapeError / ConfigError when the invariants do not hold.
  /// With requireOutputWeights = false the output weights may still be empty.
  void validate(bool requireOutputWeights = true) const;
};

/// Inputs P x N with targets P.
struct RegressionData {
  Matrix inputs;
  Vector targets;

  RegressionData() = default;
  RegressionData(Matrix x, Vector t);

  Index sampleCount() const noexcept { return inputs.rows(); }
  Index featureCount() const noexcept { return inputs.cols(); }

  RegressionData subset(std::span<const Index> rows) const;
};

using HiddenMatrix = Matrix;

/// H(p, k) = activation(w_k . x_p + b_k), P x M.
HiddenMatrix buildHiddenMatrix(const ElmModel& model, const Matrix& inputs,
                               Execution exec = Execution::parallel);

/// Scalar triple loop; the serial reference the fast kernel is checked against.
HiddenMatrix buildHiddenMatrixReference(const ElmModel& model, const Matrix& inputs);

enum class SolveRoute {
  normalEquations,      // (H^T H + lambda I) beta = H^T T, P >= M
  dualNormalEquations,  // beta = H^T (H H^T + lambda I)^-1 T, P < M
  minimumNorm,          // complete orthogonal decomposition of H
  ridgeAugmented,       // [H; sqrt(lambda) I] beta = [T; 0] via COD
};

struct OutputSolve {
  Vector weights;
  SolveRoute route;
};

/// Reciprocal condition number below which the Cholesky route is abandoned.
inline constexpr double kNormalEquationMinRcond = 1e-10;

/// Minimum-norm least squares (penalty = 0) or ridge (penalty > 0) output weights.
OutputSolve solveOutputWeightsDetailed(const HiddenMatrix& hidden, const Vector& targets,
                                       double penalty);
Vector solveOutputWeights(const HiddenMatrix& hidden, const Vector& targets, double penalty);

Vector predict(const ElmModel& model, const Matrix& inputs,
               Execution exec = Execution::parallel);

}  // namespace eelm::elm
