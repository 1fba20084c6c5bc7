#pragma once

#include <cstdint>
#include <vector>

#include "eelm/types.hpp"

namespace eelm::harness {

struct FoldPlan {
  int foldCount = 5;
  int runCount = 20;
  std::uint64_t masterSeed = 0;

  void validate() const;
};

struct Fold {
  std::vector<Index> train;  // ascending
  std::vector<Index> test;   // ascending
};

/// K-fold split of a permutation seeded by (masterSeed, runIndex). Fold k's
/// test set is shard k; the first sampleCount % foldCount shards hold one
/// extra sample.
std::vector<Fold> makeFolds(Index sampleCount, const FoldPlan& plan, int runIndex);

/// The shuffled order the folds are cut from.
std::vector<Index> foldPermutation(Index sampleCount, const FoldPlan& plan, int runIndex);

}  // namespace eelm::harness
