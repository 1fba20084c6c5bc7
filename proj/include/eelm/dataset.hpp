#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "eelm/elm.hpp"

namespace eelm::harness {

struct LoadedDataset {
  elm::RegressionData data;
  std::vector<std::string> featureNames;
};

/// Feature CSV: header row, numeric columns, last column named "target".
LoadedDataset readFeatureCsv(std::istream& in);
LoadedDataset readFeatureCsv(const std::filesystem::path& path);

/// Column-wise min-max scaling to [0, 1] fitted on one set of rows and applied
/// to others. Constant columns map to 0.
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  static MinMaxScaler fit(const Matrix& x);

  Matrix transform(const Matrix& x) const;
  const Vector& minimum() const noexcept { return min_; }
  const Vector& maximum() const noexcept { return max_; }

 private:
  Vector min_;
  Vector max_;
};

}  // namespace eelm::harness
