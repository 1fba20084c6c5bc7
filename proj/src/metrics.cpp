#include "eelm/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

namespace eelm::harness {

namespace {

void checkLengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError(fmt::format("predictions have {} entries but targets have {}", a.size(), b.size()));
  if (a.empty()) throw ShapeError("metrics need at least one sample");
}

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace

double pairwiseSum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwiseSum(values.first(half)) + pairwiseSum(values.subspan(half));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ShapeError("mean of an empty sequence");
  return pairwiseSum(values) / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - m) * (values[i] - m);
  return std::sqrt(pairwiseSum(sq) / static_cast<double>(values.size() - 1));
}

double rmse(std::span<const double> predictions, std::span<const double> targets) {
  checkLengths(predictions, targets);
  std::vector<double> sq(predictions.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    const double e = predictions[i] - targets[i];
    sq[i] = e * e;
  }
  return std::sqrt(pairwiseSum(sq) / static_cast<double>(sq.size()));
}

double rmse(const Vector& predictions, const Vector& targets) { return rmse(view(predictions), view(targets)); }

double rSquared(std::span<const double> predictions, std::span<const double> targets) {
  checkLengths(predictions, targets);
  const double m = mean(targets);
  std::vector<double> res(targets.size()), tot(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    res[i] = (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    tot[i] = (targets[i] - m) * (targets[i] - m);
  }
  const double ssTot = pairwiseSum(tot);
  if (!(ssTot > 0.0)) throw NumericalError("R^2 undefined: targets have zero variance");
  return 1.0 - pairwiseSum(res) / ssTot;
}

double rSquared(const Vector& predictions, const Vector& targets) {
  return rSquared(view(predictions), view(targets));
}

}  // namespace eelm::harness
