#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "irec/common/error.hpp"
#include "irec/data/catalog.hpp"

namespace irec::data {

class AuthFailure : public TransportError {
 public:
  using TransportError::TransportError;
};

class RateLimited : public TransportError {
 public:
  using TransportError::TransportError;
};

class NetworkError : public TransportError {
 public:
  using TransportError::TransportError;
};

// movieId -> external (TMDB) id.
using LinkTable = std::map<ItemId, std::int64_t>;

LinkTable parse_links_text(std::string_view text);
LinkTable parse_links(const std::filesystem::path& path);

struct MetadataConfig {
  std::string endpoint = "https://api.themoviedb.org/3";
  std::string api_key;  // sent as a bearer token
  std::string language = "fr-FR";
  std::size_t max_attempts = 4;
  std::chrono::milliseconds backoff{500};
  std::size_t max_inflight = 4;
  std::chrono::milliseconds timeout{10000};
};

struct Enrichment {
  ItemCatalog catalog;
  std::vector<ItemId> unmatched;  // incomplete items with no usable record
  std::size_t requests = 0;
};

// Fills empty titles and genre lists from GET {endpoint}/movie/{id}. Fields
// that are already set are never touched and complete items are not fetched.
Enrichment enrich_metadata(const ItemCatalog& catalog, const LinkTable& links,
                           const MetadataConfig& config);

}  // namespace irec::data
