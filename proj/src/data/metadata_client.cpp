#include "irec/data/metadata_client.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "irec/common/csv.hpp"
#include "irec/common/files.hpp"
#include "irec/common/url.hpp"

namespace irec::data {

LinkTable parse_links_text(std::string_view text) {
  LinkTable links;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = csv::chomp(raw);
    if (line.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      continue;
    }
    if (!csv::split_line(line, fields) || fields.size() < 2) {
      throw MalformedRow(line_no, "expected movieId,tmdbId");
    }
    ItemId item = 0;
    std::int64_t external = 0;
    const auto& a = fields[0];
    // MovieLens links.csv has movieId,imdbId,tmdbId; take the last column.
    const auto& b = fields.back();
    if (b.empty()) continue;
    if (std::from_chars(a.data(), a.data() + a.size(), item).ec != std::errc() ||
        std::from_chars(b.data(), b.data() + b.size(), external).ec != std::errc()) {
      throw MalformedRow(line_no, "non-numeric id");
    }
    links[item] = external;
  }
  if (!saw_header) throw EmptyFile("links file is empty");
  return links;
}

LinkTable parse_links(const std::filesystem::path& path) {
  return parse_links_text(read_file(path));
}

namespace {

struct Fetched {
  std::string title;
  std::vector<std::string> genres;
};

// nullopt: no record for this id (404).
std::optional<Fetched> fetch_one(httplib::Client& client,
                                 const std::string& path,
                                 const MetadataConfig& config) {
  const httplib::Headers headers{{"Authorization", "Bearer " + config.api_key},
                                 {"Accept", "application/json"}};
  auto delay = config.backoff;
  for (std::size_t attempt = 1;; ++attempt) {
    auto res = client.Get(path, headers);
    if (!res) {
      throw NetworkError(fmt::format("GET {}: {}", path, httplib::to_string(res.error())));
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthFailure(fmt::format("metadata API rejected the key ({})", res->status));
    }
    if (res->status == 404) return std::nullopt;
    if (res->status == 429 || res->status >= 500) {
      if (attempt >= config.max_attempts) {
        if (res->status == 429) {
          throw RateLimited(fmt::format("still rate limited after {} attempts", attempt));
        }
        throw NetworkError(fmt::format("GET {} returned {}", path, res->status));
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
      continue;
    }
    if (res->status != 200) {
      throw NetworkError(fmt::format("GET {} returned {}", path, res->status));
    }
    try {
      const auto doc = nlohmann::json::parse(res->body);
      Fetched out;
      out.title = doc.value("title", std::string());
      if (doc.contains("genres")) {
        for (const auto& g : doc.at("genres")) {
          out.genres.push_back(g.at("name").get<std::string>());
        }
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw NetworkError(fmt::format("GET {}: bad payload: {}", path, e.what()));
    }
  }
}

}  // namespace

Enrichment enrich_metadata(const ItemCatalog& catalog, const LinkTable& links,
                           const MetadataConfig& config) {
  if (config.api_key.empty()) throw AuthFailure("metadata API key is empty");
  Enrichment result{catalog, {}, 0};

  struct Job {
    ItemId item;
    std::int64_t external;
  };
  std::vector<Job> jobs;
  for (const Item& item : catalog.entries()) {
    if (item.complete()) continue;
    const auto link = links.find(item.id);
    if (link == links.end()) {
      result.unmatched.push_back(item.id);
    } else {
      jobs.push_back({item.id, link->second});
    }
  }
  if (jobs.empty()) return result;

  const UrlParts url = split_url(config.endpoint);
  std::vector<std::optional<Fetched>> fetched(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    httplib::Client client(url.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    while (!failed) {
      const std::size_t k = next++;
      if (k >= jobs.size()) return;
      const auto path = fmt::format("{}/movie/{}?language={}", url.base_path,
                                    jobs[k].external, config.language);
      try {
        fetched[k] = fetch_one(client, path, config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t n_workers =
      std::clamp<std::size_t>(config.max_inflight, 1, jobs.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  result.requests = jobs.size();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    Item* item = result.catalog.find(jobs[k].item);
    const auto& record = fetched[k];
    if (!record || (record->title.empty() && record->genres.empty())) {
      result.unmatched.push_back(jobs[k].item);
      continue;
    }
    if (item->title.empty()) item->title = record->title;
    if (item->genres.empty()) item->genres = record->genres;
  }
  std::sort(result.unmatched.begin(), result.unmatched.end());
  for (const ItemId id : result.unmatched) {
    spdlog::warn("no metadata found for item {}", id);
  }
  return result;
}

}  // namespace irec::data
