#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "irec/bssmf/fit.hpp"
#include "irec/data/curate.hpp"
#include "irec/data/holdout.hpp"
#include "irec/explain/chat_client.hpp"
#include "irec/recommend/recommend.hpp"

namespace irec::cli {

struct InputPaths {
  std::filesystem::path ratings;    // MovieLens-style ratings
  std::filesystem::path catalog;    // movies file
  std::filesystem::path links;      // movieId -> external id, for metadata
  std::filesystem::path survey;     // ratings collected from participants
  std::filesystem::path responses;  // questionnaire answers
};

struct MetadataSettings {
  bool enabled = false;
  std::string endpoint = "https://api.themoviedb.org/3";
  std::string api_key_env = "TMDB_API_KEY";
  std::string language = "fr-FR";
  std::size_t max_inflight = 4;
};

struct PipelineConfig {
  InputPaths paths;
  std::filesystem::path out = "run";
  std::uint64_t seed = 42;

  MetadataSettings metadata;
  std::int64_t survey_user_offset = 0;  // 0: one past the largest base user id
  data::CurateOptions curate;
  data::HoldoutOptions split;
  std::vector<std::size_t> ranks = {3, 5, 10};
  bssmf::FitConfig fit;
  recommend::RecConfig rec;
  std::size_t rec_rank = 5;
  explain::LlmConfig llm;
  std::string llm_mode = "http";  // or "stub:<fixture dir>"
  double alpha = 0.05;

  // Copies the run seed into every seeded stage.
  void propagate_seed();
  // Throws ConfigError on any inconsistent field.
  void validate() const;
};

// TOML document; unknown keys are rejected. Relative paths resolve against
// base_dir. The seed is propagated.
PipelineConfig parse_config_text(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& file);

// Canonical JSON of every setting that affects outputs (the output directory
// is left out), used for the manifest's config hash.
std::string config_json(const PipelineConfig& config);

}  // namespace irec::cli
