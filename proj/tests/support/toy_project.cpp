#include "support/toy_project.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "irec/common/rng.hpp"
#include "irec/stats/study.hpp"
#include "support/synthetic.hpp"

namespace irec::testing {

namespace {

void put(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

}  // namespace

void write_toy_project(const std::filesystem::path& dir, const ToyProject& spec) {
  std::filesystem::create_directories(dir / "stub");
  Rng rng(spec.seed);
  const auto truth = random_model(spec.items, spec.users, 4, rng);

  std::string ratings = "userId,movieId,rating\n";
  for (std::size_t u = 0; u < spec.users; ++u) {
    for (std::size_t i = 0; i < spec.items; ++i) {
      // The first ten items are popular and every user loves one of them, so
      // each user keeps a liked item through curation.
      const bool favourite = i == u % 10;
      if (!favourite && rng.uniform() > (i < 10 ? 0.8 : 0.45)) continue;
      const double x = truth.W().row(static_cast<Eigen::Index>(i)).dot(
                           truth.H().col(static_cast<Eigen::Index>(u))) +
                       0.4 * (rng.uniform() - 0.5);
      const int value = favourite ? 5 : std::clamp(static_cast<int>(std::lround(x)), 1, 5);
      ratings += fmt::format("{},{},{}\n", u + 1, i + 1, value);
    }
  }
  put(dir / "ratings.csv", ratings);

  static constexpr const char* kGenres[] = {"Drama", "Comedy", "Action", "Thriller", "Romance"};
  std::string movies = "movieId,title,genres,year\n";
  for (std::size_t i = 0; i < spec.items; ++i) {
    movies += fmt::format("{},Movie {},{}|{},{}\n", i + 1, i + 1, kGenres[i % 5],
                          kGenres[(i / 5) % 5], 1990 + i % 30);
  }
  put(dir / "movies.csv", movies);

  std::string responses = "respondent,group,question,value\n";
  for (int group = 0; group < stats::kGroups; ++group) {
    for (int r = 0; r < 20; ++r) {
      const auto id = fmt::format("g{}r{}", group, r);
      for (const auto q : stats::kQuestions) {
        if (group == 0 && q != stats::kAllGroupsQuestion) continue;
        int value = 1 + static_cast<int>(rng.index(4));
        if (spec.planted_effect && group == 3 && (q == "E1" || q == "S1")) {
          value = std::min(5, value + 2);
        }
        responses += fmt::format("{},{},{},{}\n", id, group, q, value);
      }
    }
  }
  put(dir / "responses.csv", responses);
  put(dir / "stub" / "default.txt", spec.stub_reply);

  std::string ranks;
  for (const auto r : spec.ranks) ranks += (ranks.empty() ? "" : ", ") + std::to_string(r);
  put(dir / "cfg.toml", fmt::format(R"(seed = {}
out = "run"

[paths]
ratings = "ratings.csv"
catalog = "movies.csv"
responses = "responses.csv"

[curate]
size = {}

[fit]
ranks = [{}]

[rec]
rank = {}

[llm]
mode = "stub:stub"
)",
                                    spec.seed, spec.curate, ranks, spec.rec_rank));
}

}  // namespace irec::testing
