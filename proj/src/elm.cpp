#include "eelm/elm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace eelm::elm {

Activation parseActivation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "linear") return Activation::linear;
  throw ConfigError(fmt::format("unknown activation '{}'", name));
}

std::string_view toString(Activation a) noexcept {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "?";
}

double sigmoid(double z) noexcept {
  z = std::clamp(z, -500.0, 500.0);
  return 1.0 / (1.0 + std::exp(-z));
}

double activate(Activation a, double z) noexcept {
  switch (a) {
    case Activation::sigmoid: return sigmoid(z);
    case Activation::tanh: return std::tanh(z);
    case Activation::linear: return z;
  }
  return z;
}

void ElmModel::validate(bool requireOutputWeights) const {
  const Index m = inputWeights.rows();
  if (m < 1 || inputWeights.cols() < 1)
    throw ShapeError("model needs at least one hidden node and one input");
  if (hiddenBiases.size() != m)
    throw ShapeError(fmt::format("hidden biases have length {} but the model has {} hidden nodes",
                                 hiddenBiases.size(), m));
  if ((requireOutputWeights || outputWeights.size() != 0) && outputWeights.size() != m)
    throw ShapeError(fmt::format("output weights have length {} but the model has {} hidden nodes",
                                 outputWeights.size(), m));
  if (!(penalty >= 0.0)) throw ConfigError("regularization penalty must be >= 0");
}

RegressionData::RegressionData(Matrix x, Vector t) : inputs(std::move(x)), targets(std::move(t)) {
  if (inputs.rows() != targets.size())
    throw ShapeError(fmt::format("inputs have {} rows but targets have {} entries", inputs.rows(),
                                 targets.size()));
  if (inputs.rows() < 1 || inputs.cols() < 1)
    throw ShapeError("regression data needs at least one sample and one feature");
}

RegressionData RegressionData::subset(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), inputs.cols());
  Vector t(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Index>(r)) = inputs.row(rows[r]);
    t(static_cast<Index>(r)) = targets(rows[r]);
  }
  return RegressionData(std::move(x), std::move(t));
}

namespace {

void checkInputShape(const ElmModel& model, const Matrix& inputs) {
  if (inputs.cols() != model.inputCount())
    throw ShapeError(fmt::format("inputs have {} columns but the model expects {} inputs",
                                 inputs.cols(), model.inputCount()));
}

}  // namespace

HiddenMatrix buildHiddenMatrix(const ElmModel& model, const Matrix& inputs, Execution exec) {
  model.validate(false);
  checkInputShape(model, inputs);
  const Index p = inputs.rows();
  const Index m = model.hiddenCount();
  // Each row is computed independently, so the partitioning never changes a value.
  RowMatrix out(p, m);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel && p > 64)
  for (Index row = 0; row < p; ++row) {
    Vector z = model.inputWeights * inputs.row(row).transpose();
    for (Index k = 0; k < m; ++k) out(row, k) = activate(model.activation, z(k) + model.hiddenBiases(k));
  }
  return out;
}

HiddenMatrix buildHiddenMatrixReference(const ElmModel& model, const Matrix& inputs) {
  model.validate(false);
  checkInputShape(model, inputs);
  HiddenMatrix h(inputs.rows(), model.hiddenCount());
  for (Index p = 0; p < inputs.rows(); ++p) {
    for (Index k = 0; k < model.hiddenCount(); ++k) {
      double z = model.hiddenBiases(k);
      for (Index n = 0; n < inputs.cols(); ++n) z += model.inputWeights(k, n) * inputs(p, n);
      h(p, k) = activate(model.activation, z);
    }
  }
  return h;
}

namespace {

Vector minimumNormSolve(const Matrix& a, const Vector& b) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  return cod.solve(b);
}

Vector ridgeAugmentedSolve(const HiddenMatrix& h, const Vector& t, double penalty) {
  const Index p = h.rows();
  const Index m = h.cols();
  Matrix a(p + m, m);
  a.topRows(p) = h;
  a.bottomRows(m) = std::sqrt(penalty) * Matrix::Identity(m, m);
  Vector b = Vector::Zero(p + m);
  b.head(p) = t;
  return minimumNormSolve(a, b);
}

}  // namespace

OutputSolve solveOutputWeightsDetailed(const HiddenMatrix& hidden, const Vector& targets,
                                       double penalty) {
  if (hidden.rows() != targets.size())
    throw ShapeError(fmt::format("hidden matrix has {} rows but targets have {} entries",
                                 hidden.rows(), targets.size()));
  if (hidden.rows() < 1 || hidden.cols() < 1) throw ShapeError("empty hidden matrix");
  if (!(penalty >= 0.0) || !std::isfinite(penalty))
    throw ConfigError("regularization penalty must be finite and >= 0");
  if (!hidden.allFinite() || !targets.allFinite())
    throw NumericalError("hidden matrix or targets contain non-finite entries");

  const Index p = hidden.rows();
  const Index m = hidden.cols();
  OutputSolve result;
  if (p >= m) {
    Matrix gram = hidden.transpose() * hidden;
    gram.diagonal().array() += penalty;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success && llt.rcond() >= kNormalEquationMinRcond) {
      result.weights = llt.solve(hidden.transpose() * targets);
      result.route = SolveRoute::normalEquations;
    }
  } else {
    Matrix gram = hidden * hidden.transpose();
    gram.diagonal().array() += penalty;
    Eigen::LLT<Matrix> llt(gram);
    if (llt.info() == Eigen::Success && llt.rcond() >= kNormalEquationMinRcond) {
      result.weights = hidden.transpose() * llt.solve(targets);
      result.route = SolveRoute::dualNormalEquations;
    }
  }
  if (result.weights.size() == 0) {
    if (penalty > 0.0) {
      result.weights = ridgeAugmentedSolve(hidden, targets, penalty);
      result.route = SolveRoute::ridgeAugmented;
    } else {
      result.weights = minimumNormSolve(hidden, targets);
      result.route = SolveRoute::minimumNorm;
    }
  }
  if (!result.weights.allFinite()) throw NumericalError("output-weight solve produced non-finite values");
  return result;
}

Vector solveOutputWeights(const HiddenMatrix& hidden, const Vector& targets, double penalty) {
  return solveOutputWeightsDetailed(hidden, targets, penalty).weights;
}

Vector predict(const ElmModel& model, const Matrix& inputs, Execution exec) {
  model.validate(true);
  const HiddenMatrix h = buildHiddenMatrix(model, inputs, exec);
  Vector out(h.rows());
  for (Index p = 0; p < h.rows(); ++p) out(p) = h.row(p).dot(model.outputWeights);
  return out;
}

}  // namespace eelm::elm
