#include "irec/cli/config.hpp"

#include <algorithm>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "irec/common/error.hpp"
#include "irec/common/files.hpp"

namespace irec::cli {

namespace fs = std::filesystem;

void PipelineConfig::propagate_seed() {
  split.seed = seed;
  fit.seed = seed;
  rec.seed = seed;
}

void PipelineConfig::validate() const {
  if (ranks.empty()) throw ConfigError("fit.ranks must list at least one rank");
  for (const std::size_t r : ranks) {
    bssmf::FitConfig probe = fit;
    probe.rank = r;
    probe.validate();
  }
  if (rec_rank == 0) throw ConfigError("rec.rank must be >= 1");
  rec.validate();
  llm.validate();
  if (curate.size == 0) throw ConfigError("curate.size must be >= 1");
  if (!(curate.decay_per_year >= 0.0)) throw ConfigError("curate.decay_per_year must be >= 0");
  if (split.per_user == 0 || split.per_user > split.min_ratings) {
    throw ConfigError("split.per_user must lie in 1..split.min_ratings");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("stats.alpha must lie in (0, 1)");
  if (survey_user_offset < 0) throw ConfigError("ingest.survey_user_offset must be >= 0");
  if (metadata.max_inflight == 0) throw ConfigError("metadata.max_inflight must be >= 1");
  if (llm_mode != "http" && !llm_mode.starts_with("stub:")) {
    throw ConfigError("llm mode must be 'http' or 'stub:<dir>'");
  }
}

namespace {

class Section {
 public:
  Section(const toml::table* table, std::string name) : table_(table), name_(std::move(name)) {}

  void allow(std::initializer_list<std::string_view> keys) const {
    if (table_ == nullptr) return;
    for (const auto& [key, node] : *table_) {
      if (std::find(keys.begin(), keys.end(), key.str()) == keys.end()) {
        throw ConfigError(fmt::format("unknown config key '{}{}'", prefix(), key.str()));
      }
    }
  }

  template <class T>
  void get(std::string_view key, T& out) const {
    const toml::node* node = find(key);
    if (node == nullptr) return;
    if constexpr (std::is_same_v<T, bool>) {
      const auto v = node->value_exact<bool>();
      if (!v) fail(key, "a boolean");
      out = *v;
    } else if constexpr (std::is_integral_v<T>) {
      const auto v = node->value_exact<std::int64_t>();
      if (!v) fail(key, "an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (*v < 0) fail(key, "a non-negative integer");
      }
      out = static_cast<T>(*v);
    } else if constexpr (std::is_floating_point_v<T>) {
      const auto v = node->value<double>();
      if (!v) fail(key, "a number");
      out = *v;
    } else {
      const auto v = node->value_exact<std::string>();
      if (!v) fail(key, "a string");
      out = *v;
    }
  }

  void get_path(std::string_view key, fs::path& out, const fs::path& base) const {
    std::string text;
    get(key, text);
    if (!text.empty()) out = fs::path(text).is_absolute() ? fs::path(text) : base / text;
  }

  void get_millis(std::string_view key, std::chrono::milliseconds& out) const {
    if (find(key) == nullptr) return;
    double seconds = 0.0;
    get(key, seconds);
    out = std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000.0 + 0.5));
  }

  void get_sizes(std::string_view key, std::vector<std::size_t>& out) const {
    const toml::node* node = find(key);
    if (node == nullptr) return;
    const toml::array* array = node->as_array();
    if (array == nullptr) fail(key, "an array of integers");
    out.clear();
    for (const auto& element : *array) {
      const auto v = element.value_exact<std::int64_t>();
      if (!v || *v < 1) fail(key, "an array of positive integers");
      out.push_back(static_cast<std::size_t>(*v));
    }
  }

 private:
  const toml::node* find(std::string_view key) const {
    return table_ == nullptr ? nullptr : table_->get(key);
  }

  std::string prefix() const { return name_.empty() ? std::string() : name_ + "."; }

  [[noreturn]] void fail(std::string_view key, std::string_view expected) const {
    throw ConfigError(fmt::format("config key '{}{}' must be {}", prefix(), key, expected));
  }

  const toml::table* table_;
  std::string name_;
};

Section section(const toml::table& root, std::string_view name) {
  const toml::node* node = root.get(name);
  if (node == nullptr) return Section(nullptr, std::string(name));
  const toml::table* table = node->as_table();
  if (table == nullptr) throw ConfigError(fmt::format("config key '{}' must be a table", name));
  return Section(table, std::string(name));
}

}  // namespace

PipelineConfig parse_config_text(std::string_view text, const fs::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream where;
    where << e.source().begin;
    throw ConfigError(fmt::format("config parse error at {}: {}", where.str(), e.description()));
  }

  PipelineConfig c;
  const Section top(&root, "");
  top.allow({"seed", "out", "paths", "ingest", "metadata", "curate", "split", "fit", "rec",
             "llm", "stats"});
  top.get("seed", c.seed);
  top.get_path("out", c.out, base_dir);

  const Section paths = section(root, "paths");
  paths.allow({"ratings", "catalog", "links", "survey", "responses"});
  paths.get_path("ratings", c.paths.ratings, base_dir);
  paths.get_path("catalog", c.paths.catalog, base_dir);
  paths.get_path("links", c.paths.links, base_dir);
  paths.get_path("survey", c.paths.survey, base_dir);
  paths.get_path("responses", c.paths.responses, base_dir);

  const Section ingest = section(root, "ingest");
  ingest.allow({"survey_user_offset"});
  ingest.get("survey_user_offset", c.survey_user_offset);

  const Section meta = section(root, "metadata");
  meta.allow({"enabled", "endpoint", "api_key_env", "language", "max_inflight"});
  meta.get("enabled", c.metadata.enabled);
  meta.get("endpoint", c.metadata.endpoint);
  meta.get("api_key_env", c.metadata.api_key_env);
  meta.get("language", c.metadata.language);
  meta.get("max_inflight", c.metadata.max_inflight);

  const Section curate = section(root, "curate");
  curate.allow({"size", "decay_per_year", "ref_year"});
  curate.get("size", c.curate.size);
  curate.get("decay_per_year", c.curate.decay_per_year);
  curate.get("ref_year", c.curate.ref_year);

  const Section split = section(root, "split");
  split.allow({"per_user", "min_ratings"});
  split.get("per_user", c.split.per_user);
  split.get("min_ratings", c.split.min_ratings);

  const Section fit = section(root, "fit");
  fit.allow({"ranks", "max_outer", "rel_tol", "inner_steps", "threads", "shrink",
             "sufficient_decrease", "lo", "hi"});
  fit.get_sizes("ranks", c.ranks);
  fit.get("max_outer", c.fit.max_outer);
  fit.get("rel_tol", c.fit.rel_tol);
  fit.get("inner_steps", c.fit.inner_steps);
  fit.get("threads", c.fit.threads);
  fit.get("shrink", c.fit.armijo.shrink);
  fit.get("sufficient_decrease", c.fit.armijo.sufficient_decrease);
  fit.get("lo", c.fit.lo);
  fit.get("hi", c.fit.hi);

  const Section rec = section(root, "rec");
  rec.allow({"rank", "threshold", "pool_cap", "slate_size"});
  rec.get("rank", c.rec_rank);
  rec.get("threshold", c.rec.threshold);
  rec.get("pool_cap", c.rec.pool_cap);
  rec.get("slate_size", c.rec.slate_size);

  const Section llm = section(root, "llm");
  llm.allow({"mode", "endpoint", "model", "temperature", "max_tokens", "timeout_s", "max_retries",
             "backoff_s", "api_key_env", "max_inflight", "keep_translation"});
  llm.get("mode", c.llm_mode);
  llm.get("endpoint", c.llm.endpoint);
  llm.get("model", c.llm.model);
  llm.get("temperature", c.llm.temperature);
  llm.get("max_tokens", c.llm.max_tokens);
  llm.get_millis("timeout_s", c.llm.timeout);
  llm.get("max_retries", c.llm.max_retries);
  llm.get_millis("backoff_s", c.llm.backoff);
  llm.get("api_key_env", c.llm.api_key_env);
  llm.get("max_inflight", c.llm.max_inflight);
  llm.get("keep_translation", c.llm.keep_translation);
  if (c.llm_mode.starts_with("stub:")) {
    fs::path dir = c.llm_mode.substr(5);
    if (dir.is_relative()) dir = base_dir / dir;
    c.llm_mode = "stub:" + dir.string();
  }

  const Section stats = section(root, "stats");
  stats.allow({"alpha"});
  stats.get("alpha", c.alpha);

  c.propagate_seed();
  return c;
}

PipelineConfig load_config(const fs::path& file) {
  if (!fs::exists(file)) throw ConfigError("config file not found: " + file.string());
  return parse_config_text(read_file(file), fs::absolute(file).parent_path());
}

std::string config_json(const PipelineConfig& c) {
  nlohmann::ordered_json doc;
  doc["seed"] = c.seed;
  doc["paths"] = {{"ratings", c.paths.ratings.string()},
                  {"catalog", c.paths.catalog.string()},
                  {"links", c.paths.links.string()},
                  {"survey", c.paths.survey.string()},
                  {"responses", c.paths.responses.string()}};
  doc["metadata"] = {{"enabled", c.metadata.enabled},
                     {"endpoint", c.metadata.endpoint},
                     {"language", c.metadata.language}};
  doc["ingest"] = {{"survey_user_offset", c.survey_user_offset}};
  doc["curate"] = {{"size", c.curate.size},
                   {"decay_per_year", c.curate.decay_per_year},
                   {"ref_year", c.curate.ref_year}};
  doc["split"] = {{"per_user", c.split.per_user}, {"min_ratings", c.split.min_ratings}};
  doc["fit"] = {{"ranks", c.ranks},
                {"max_outer", c.fit.max_outer},
                {"rel_tol", c.fit.rel_tol},
                {"inner_steps", c.fit.inner_steps},
                {"shrink", c.fit.armijo.shrink},
                {"sufficient_decrease", c.fit.armijo.sufficient_decrease},
                {"lo", c.fit.lo},
                {"hi", c.fit.hi}};
  doc["rec"] = {{"rank", c.rec_rank},
                {"threshold", c.rec.threshold},
                {"pool_cap", c.rec.pool_cap},
                {"slate_size", c.rec.slate_size}};
  doc["llm"] = {{"mode", c.llm_mode},
                {"endpoint", c.llm.endpoint},
                {"model", c.llm.model},
                {"temperature", c.llm.temperature},
                {"max_tokens", c.llm.max_tokens},
                {"keep_translation", c.llm.keep_translation}};
  doc["stats"] = {{"alpha", c.alpha}};
  return doc.dump();
}

}  // namespace irec::cli
