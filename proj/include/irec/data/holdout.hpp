#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "irec/data/ratings.hpp"

namespace irec::data {

struct HoldoutOptions {
  std::size_t per_user = 5;
  // Users need strictly more than this many ratings to contribute test triples.
  std::size_t min_ratings = 10;
  std::uint64_t seed = 0;
};

struct HoldoutSplit {
  RatingDataset train;
  std::vector<Rating> test;  // sorted by (user, item)
};

// Per eligible user, per_user triples drawn uniformly without replacement go to
// test. Requires 1 <= per_user <= min_ratings so every eligible user keeps at
// least one training rating.
HoldoutSplit split_holdout(const RatingDataset& dataset,
                           const HoldoutOptions& options);

// Split manifest: {"seed", "per_user", "min_ratings", "test": [[u, i, r], ...]}.
std::string split_manifest_json(const HoldoutSplit& split,
                                const HoldoutOptions& options);

// Rebuilds a split from its source dataset and a manifest. Throws DataError if
// a test triple is not part of the source.
HoldoutSplit split_from_manifest(const RatingDataset& source,
                                 std::string_view manifest_json);

}  // namespace irec::data
