#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/common/ids.hpp"

namespace irec::data {

inline constexpr int kMinYear = 1870;

struct Item {
  ItemId id = 0;
  std::string title;
  std::vector<std::string> genres;
  int year = kMinYear;

  bool complete() const { return !title.empty() && !genres.empty(); }
};

class MalformedRow : public DataError {
 public:
  MalformedRow(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class EmptyFile : public DataError {
 public:
  using DataError::DataError;
};

class ItemCatalog {
 public:
  // Throws DataError on a duplicate id or a year before kMinYear.
  void add(Item item);

  bool contains(ItemId id) const { return index_.contains(id); }
  const Item* find(ItemId id) const;
  Item* find(ItemId id);
  const Item& at(ItemId id) const;

  std::span<const Item> entries() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }

 private:
  std::vector<Item> items_;
  std::unordered_map<ItemId, std::size_t> index_;
};

// Accepts the canonical layout `movieId,title,genres,year` (genres
// pipe-separated) or the MovieLens `movieId,title,genres` layout, where the
// year is read from a trailing "(YYYY)" in the title. MovieLens rows without a
// usable year are skipped and counted.
struct CatalogParse {
  ItemCatalog catalog;
  std::size_t skipped = 0;
};

CatalogParse parse_catalog_text(std::string_view text);
CatalogParse parse_catalog(const std::filesystem::path& path);

// Canonical four-column layout, rows in insertion order.
std::string serialize_catalog(const ItemCatalog& catalog);

ItemCatalog restrict_catalog(const ItemCatalog& catalog,
                             std::span<const ItemId> keep);

}  // namespace irec::data
