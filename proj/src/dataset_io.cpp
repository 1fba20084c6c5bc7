#include "eelm/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace eelm::harness {

namespace {

std::vector<std::string> splitComma(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

LoadedDataset readFeatureCsv(std::istream& in) {
  std::string line;
  std::size_t lineNo = 0;
  auto next = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineNo;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };
  if (!next()) throw ParseError(1, "empty feature file");
  auto header = splitComma(line);
  if (header.size() < 2 || header.back() != "target")
    throw ParseError(lineNo, "header must name at least one feature and end with 'target'");
  const std::size_t cols = header.size();

  std::vector<std::vector<double>> rows;
  while (next()) {
    const auto cells = splitComma(line);
    if (cells.size() != cols)
      throw ParseError(lineNo, fmt::format("expected {} columns, got {}", cols, cells.size()));
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const auto& s = cells[c];
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), row[c]);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError(lineNo, fmt::format("non-numeric value '{}' in column '{}'", s, header[c]));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(lineNo, "feature file has no data rows");

  Matrix x(static_cast<Index>(rows.size()), static_cast<Index>(cols - 1));
  Vector t(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) x(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    t(static_cast<Index>(r)) = rows[r][cols - 1];
  }
  header.pop_back();
  return {elm::RegressionData(std::move(x), std::move(t)), std::move(header)};
}

LoadedDataset readFeatureCsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open dataset file '{}'", path.string()));
  return readFeatureCsv(in);
}

MinMaxScaler MinMaxScaler::fit(const Matrix& x) {
  if (x.rows() < 1) throw ShapeError("cannot fit a scaler on zero rows");
  MinMaxScaler s;
  s.min_ = x.colwise().minCoeff().transpose();
  s.max_ = x.colwise().maxCoeff().transpose();
  return s;
}

Matrix MinMaxScaler::transform(const Matrix& x) const {
  if (x.cols() != min_.size())
    throw ShapeError(fmt::format("scaler fitted on {} columns, got {}", min_.size(), x.cols()));
  Matrix out(x.rows(), x.cols());
  for (Index c = 0; c < x.cols(); ++c) {
    const double range = max_(c) - min_(c);
    if (range > 0.0)
      out.col(c) = (x.col(c).array() - min_(c)) / range;
    else
      out.col(c).setZero();
  }
  return out;
}

}  // namespace eelm::harness
