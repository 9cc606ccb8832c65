#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace msaprobe {

using Fold = std::vector<std::string>;

/// Sorts the ids, shuffles them with `seed`, and deals them round-robin into
/// k folds. Throws ValidationError when there are fewer ids than folds or
/// duplicate ids.
std::vector<Fold> make_folds(std::vector<std::string> track_ids, std::size_t k, std::uint64_t seed);

struct FoldSplit {
  Fold train;
  Fold val;
  Fold test;
};

/// Fold i is the test set, fold (i+1) mod k validates, the rest train.
FoldSplit split_for(const std::vector<Fold>& folds, std::size_t i);

}  // namespace msaprobe
