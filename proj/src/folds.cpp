#include "msaprobe/folds.h"

#include <algorithm>
#include <random>

#include "msaprobe/errors.h"

namespace msaprobe {

std::vector<Fold> make_folds(std::vector<std::string> track_ids, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ValidationError("need at least 2 folds");
  if (track_ids.size() < k) {
    throw ValidationError("cannot split " + std::to_string(track_ids.size()) + " tracks into " + std::to_string(k) +
                          " folds");
  }
  std::sort(track_ids.begin(), track_ids.end());
  if (std::adjacent_find(track_ids.begin(), track_ids.end()) != track_ids.end()) {
    throw ValidationError("duplicate track ids");
  }
  std::mt19937_64 rng(seed);
  std::shuffle(track_ids.begin(), track_ids.end(), rng);

  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < track_ids.size(); ++i) folds[i % k].push_back(std::move(track_ids[i]));
  return folds;
}

FoldSplit split_for(const std::vector<Fold>& folds, std::size_t i) {
  const std::size_t k = folds.size();
  if (i >= k) throw ValidationError("fold index out of range");
  FoldSplit s;
  s.test = folds[i];
  s.val = folds[(i + 1) % k];
  for (std::size_t j = 0; j < k; ++j) {
    if (j == i || j == (i + 1) % k) continue;
    s.train.insert(s.train.end(), folds[j].begin(), folds[j].end());
  }
  return s;
}

}  // namespace msaprobe
