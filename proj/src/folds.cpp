#include "eelm/folds.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "eelm/rng.hpp"

namespace eelm::harness {

void FoldPlan::validate() const {
  if (foldCount < 2) throw ConfigError("fold count must be >= 2");
  if (runCount < 1) throw ConfigError("run count must be >= 1");
}

std::vector<Index> foldPermutation(Index sampleCount, const FoldPlan& plan, int runIndex) {
  std::vector<Index> idx(static_cast<std::size_t>(sampleCount));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::mt19937_64 engine(streamSeed(plan.masterSeed, {0xf01dULL, static_cast<std::uint64_t>(runIndex)}));
  std::shuffle(idx.begin(), idx.end(), engine);
  return idx;
}

std::vector<Fold> makeFolds(Index sampleCount, const FoldPlan& plan, int runIndex) {
  plan.validate();
  if (sampleCount < plan.foldCount)
    throw ConfigError(fmt::format("{} samples cannot be split into {} folds", sampleCount, plan.foldCount));
  const auto perm = foldPermutation(sampleCount, plan, runIndex);
  const Index k = plan.foldCount;
  const Index base = sampleCount / k;
  const Index extra = sampleCount % k;

  std::vector<int> owner(static_cast<std::size_t>(sampleCount));
  Index pos = 0;
  for (Index f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    for (Index s = 0; s < size; ++s) owner[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos++)])] = static_cast<int>(f);
  }
  std::vector<Fold> folds(static_cast<std::size_t>(k));
  for (Index i = 0; i < sampleCount; ++i) {
    for (Index f = 0; f < k; ++f) {
      auto& fold = folds[static_cast<std::size_t>(f)];
      (owner[static_cast<std::size_t>(i)] == f ? fold.test : fold.train).push_back(i);
    }
  }
  return folds;
}

}  // namespace eelm::harness
