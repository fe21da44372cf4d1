#include "irec/data/curate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace irec::data {

double curation_weight(double count, int year, double decay_per_year,
                       int ref_year) {
  return count * std::exp(-decay_per_year * static_cast<double>(ref_year - year));
}

namespace {

double quantize(double w) {
  if (w == 0.0 || !std::isfinite(w)) return w;
  const double scale = std::pow(10.0, 11 - static_cast<int>(std::floor(std::log10(std::fabs(w)))));
  return std::round(w * scale) / scale;
}

}  // namespace

std::vector<ItemId> rank_by_weight(std::span<const CurationCandidate> candidates,
                                   double decay_per_year, int ref_year) {
  if (decay_per_year < 0.0) {
    throw std::invalid_argument("decay rate must be non-negative");
  }
  std::vector<std::pair<double, ItemId>> keyed;
  keyed.reserve(candidates.size());
  for (const auto& c : candidates) {
    keyed.emplace_back(
        quantize(curation_weight(c.count, c.year, decay_per_year, ref_year)), c.id);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<ItemId> ids;
  ids.reserve(keyed.size());
  for (const auto& [w, id] : keyed) ids.push_back(id);
  return ids;
}

std::vector<ItemId> curate_catalog(const RatingDataset& dataset,
                                   const ItemCatalog& catalog,
                                   const CurateOptions& options) {
  if (options.size > catalog.size()) {
    throw InsufficientItems(fmt::format("asked for {} items, catalog has {}",
                                        options.size, catalog.size()));
  }
  std::unordered_map<ItemId, double> counts;
  for (const Rating& r : dataset.triples()) counts[r.item] += 1.0;
  std::vector<CurationCandidate> candidates;
  candidates.reserve(catalog.size());
  for (const Item& item : catalog.entries()) {
    const auto it = counts.find(item.id);
    candidates.push_back({item.id, it == counts.end() ? 0.0 : it->second, item.year});
  }
  auto ranked = rank_by_weight(candidates, options.decay_per_year, options.ref_year);
  ranked.resize(options.size);
  return ranked;
}

}  // namespace irec::data
