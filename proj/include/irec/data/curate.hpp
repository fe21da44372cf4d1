#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/data/catalog.hpp"
#include "irec/data/ratings.hpp"

namespace irec::data {

class InsufficientItems : public DataError {
 public:
  using DataError::DataError;
};

struct CurateOptions {
  std::size_t size = 100;
  double decay_per_year = 0.05;
  int ref_year = 2025;
};

// Popularity discounted by age: count * exp(-decay * (ref_year - year)).
double curation_weight(double count, int year, double decay_per_year,
                       int ref_year);

struct CurationCandidate {
  ItemId id = 0;
  double count = 0.0;
  int year = kMinYear;
};

// Orders candidates by weight, highest first. Weights are compared at 12
// significant digits so analytically equal weights tie, and ties go to the
// lower id.
std::vector<ItemId> rank_by_weight(std::span<const CurationCandidate> candidates,
                                   double decay_per_year, int ref_year);

// The `size` best catalog items by curation weight; counts come from dataset.
std::vector<ItemId> curate_catalog(const RatingDataset& dataset,
                                   const ItemCatalog& catalog,
                                   const CurateOptions& options);

}  // namespace irec::data
