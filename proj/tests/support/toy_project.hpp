#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace irec::testing {

// A self-contained project directory: ratings.csv, movies.csv,
// responses.csv, a stub LLM fixture directory and cfg.toml pointing at them.
struct ToyProject {
  std::size_t users = 50;
  std::size_t items = 60;
  std::size_t curate = 40;
  std::vector<std::size_t> ranks = {3, 5};
  std::size_t rec_rank = 3;
  std::uint64_t seed = 7;
  // Shift group 3 upward on E1 and S1; otherwise every group is drawn alike.
  bool planted_effect = true;
  std::string stub_reply = "Thinking... \\boxed{Tu vas adorer ce film.}";
};

void write_toy_project(const std::filesystem::path& dir, const ToyProject& spec);

}  // namespace irec::testing
