#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <boost/math/distributions/chi_squared.hpp>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>

#include "irec/bssmf/factor_model.hpp"
#include "irec/recommend/recommend.hpp"
#include "support/synthetic.hpp"

namespace irec::recommend {
namespace {

std::vector<ItemId> ids(std::size_t n) {
  std::vector<ItemId> out(n);
  std::iota(out.begin(), out.end(), ItemId{1});
  return out;
}

std::vector<ItemId> pool_items(const CandidatePool& pool) {
  std::vector<ItemId> out;
  for (const auto& e : pool.entries) out.push_back(e.item);
  return out;
}

TEST(RecConfigCheck, SlateMustFitPool) {
  RecConfig c;
  c.slate_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.slate_size = 21;
  EXPECT_THROW(c.validate(), ConfigError);
  c.slate_size = 20;
  EXPECT_NO_THROW(c.validate());
}

TEST(BuildPool, ThresholdPrefix) {
  const std::vector<double> s{4.8, 4.5, 4.2, 3.9, 2.0};
  const auto pool = build_pool(1, s, ids(5), {}, RecConfig{});
  EXPECT_EQ(pool_items(pool), (std::vector<ItemId>{1, 2, 3}));
}

TEST(BuildPool, TopThreeForcedBelowThreshold) {
  const std::vector<double> s{4.8, 3.9, 3.8, 2.0};
  const auto pool = build_pool(1, s, ids(4), {}, RecConfig{});
  EXPECT_EQ(pool_items(pool), (std::vector<ItemId>{1, 2, 3}));
}

TEST(BuildPool, CapAtTwenty) {
  std::vector<double> s(30);
  for (std::size_t k = 0; k < 30; ++k) s[k] = 4.0 + 0.03 * static_cast<double>(k);
  const auto pool = build_pool(1, s, ids(30), {}, RecConfig{});
  ASSERT_EQ(pool.entries.size(), 20u);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(pool.entries[k].item, ItemId(30 - k));
}

TEST(BuildPool, ExcludesRatedAndSortsTiesById) {
  const std::vector<double> s{4.1, 4.5, 4.5, 5.0, 4.5};
  const auto pool = build_pool(7, s, ids(5), {4}, RecConfig{});
  EXPECT_EQ(pool.user, 7u);
  EXPECT_EQ(pool_items(pool), (std::vector<ItemId>{2, 3, 5, 1}));
  EXPECT_THROW(build_pool(7, s, ids(5), {1, 2, 3, 4, 5}, RecConfig{}), NoUnratedItems);
  EXPECT_THROW(build_pool(7, s, ids(4), {}, RecConfig{}), DimensionMismatch);
}

TEST(BuildPool, RandomPoolsKeepInvariants) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<double> s(n);
    for (double& x : s) x = rng.uniform(1.0, 5.0);
    std::unordered_set<ItemId> rated;
    for (ItemId i = 1; i <= static_cast<ItemId>(n); ++i) {
      if (rng.uniform() < 0.3) rated.insert(i);
    }
    if (rated.size() == n) continue;
    const RecConfig c;
    const auto pool = build_pool(1, s, ids(n), rated, c);
    ASSERT_LE(pool.entries.size(), c.pool_cap + c.slate_size);
    std::unordered_set<ItemId> seen;
    ItemId best = 0;
    double best_score = -1.0;
    for (ItemId i = 1; i <= static_cast<ItemId>(n); ++i) {
      if (!rated.contains(i) && s[i - 1] > best_score) {
        best_score = s[i - 1];
        best = i;
      }
    }
    EXPECT_EQ(pool.entries.front().item, best);
    for (std::size_t k = 0; k < pool.entries.size(); ++k) {
      const auto& e = pool.entries[k];
      EXPECT_FALSE(rated.contains(e.item));
      EXPECT_TRUE(seen.insert(e.item).second);
      if (k > 0) {
        const auto& p = pool.entries[k - 1];
        EXPECT_TRUE(p.score > e.score || (p.score == e.score && p.item < e.item));
      }
    }
  }
}

CandidatePool make_pool(std::vector<double> scores) {
  CandidatePool pool{1, {}};
  for (std::size_t k = 0; k < scores.size(); ++k) pool.entries.push_back({ItemId(k + 1), scores[k]});
  return pool;
}

TEST(SampleSlate, SmallPoolIsReturnedWhole) {
  Rng rng(1);
  const auto pool = make_pool({4.5, 4.0});
  const auto slate = sample_slate(pool, RecConfig{}, rng);
  EXPECT_EQ(slate.items, pool.entries);
}

TEST(SampleSlate, SingleDrawIsProportional) {
  const auto pool = make_pool({5.0, 4.0});
  RecConfig c;
  c.slate_size = 1;
  int a = 0;
  const int draws = 100000;
  for (int s = 0; s < draws; ++s) {
    Rng rng = user_stream(static_cast<std::uint64_t>(s), 1);
    if (sample_slate(pool, c, rng).items.front().item == 1) ++a;
  }
  EXPECT_NEAR(static_cast<double>(a) / draws, 5.0 / 9.0, 0.01);
}

TEST(SampleSlate, EqualScoresGiveThreeQuartersInclusion) {
  const auto pool = make_pool({4.2, 4.2, 4.2, 4.2});
  Rng rng(5);
  std::array<int, 4> hits{};
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const auto slate = sample_slate(pool, RecConfig{}, rng);
    ASSERT_EQ(slate.items.size(), 3u);
    for (const auto& e : slate.items) ++hits[e.item - 1];
  }
  for (const int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, 0.75, 0.01);
}

TEST(SampleSlate, FirstDrawPassesGoodnessOfFit) {
  const std::vector<double> scores{4.9, 4.6, 4.4, 4.1, 4.0, 3.2};
  const auto pool = make_pool(scores);
  const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
  Rng rng(77);
  std::vector<int> counts(scores.size(), 0);
  const int n = 100000;
  for (int t = 0; t < n; ++t) ++counts[sample_slate(pool, RecConfig{}, rng).items[0].item - 1];
  double stat = 0.0;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double expected = n * scores[k] / total;
    stat += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  const boost::math::chi_squared dist(static_cast<double>(scores.size() - 1));
  EXPECT_GT(boost::math::cdf(boost::math::complement(dist, stat)), 0.01);
}

TEST(SampleSlate, DeterministicDistinctAndFromPool) {
  const auto pool = make_pool({4.9, 4.8, 4.7, 4.6, 4.5, 4.4, 4.3});
  for (UserId u = 1; u <= 50; ++u) {
    Rng a = user_stream(42, u);
    Rng b = user_stream(42, u);
    const auto sa = sample_slate(pool, RecConfig{}, a);
    EXPECT_EQ(sa.items, sample_slate(pool, RecConfig{}, b).items);
    std::unordered_set<ItemId> seen;
    for (const auto& e : sa.items) {
      EXPECT_TRUE(seen.insert(e.item).second);
      EXPECT_NE(std::find(pool.entries.begin(), pool.entries.end(), e), pool.entries.end());
    }
  }
}

TEST(SampleSlate, RejectsNonPositiveScores) {
  Rng rng(1);
  EXPECT_THROW(sample_slate(make_pool({4.0, 3.0, 0.0, 2.0}), RecConfig{}, rng), DataError);
}

TEST(TopSlate, FirstEntriesWithIdTies) {
  const std::vector<double> s{4.0, 4.7, 4.7, 4.7};
  const auto pool = build_pool(1, s, ids(4), {}, RecConfig{});
  const auto slate = top_slate(pool, RecConfig{});
  ASSERT_EQ(slate.items.size(), 3u);
  EXPECT_EQ(slate.items[0].item, 2u);
  EXPECT_EQ(slate.items[1].item, 3u);
  EXPECT_EQ(slate.items[2].item, 4u);
  EXPECT_EQ(top_slate(make_pool({4.0, 3.0}), RecConfig{}).items.size(), 2u);
}

TEST(Coverage, CountsDistinctItems) {
  EXPECT_EQ(coverage(std::span<const Slate>{}), 0u);
  const Slate a{1, {{1, 4.0}, {2, 4.0}, {3, 4.0}}};
  const Slate b{2, {{3, 4.0}, {2, 4.0}, {1, 4.0}}};
  const std::vector<Slate> both{a, b};
  EXPECT_EQ(coverage(both), 3u);
}

TEST(Coverage, SampledDominatesTopOnPopulation) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const auto model = testing::random_model(150, 120, 5, rng);
    std::vector<Slate> sampled;
    std::vector<Slate> top;
    const RecConfig c;
    for (std::size_t u = 0; u < model.n_users(); ++u) {
      const Eigen::VectorXd p = bssmf::predict(model, u);
      const auto pool = build_pool(model.user_ids()[u], std::span<const double>(p.data(), p.size()),
                                   model.item_ids(), {}, c);
      Rng stream = user_stream(seed, pool.user);
      sampled.push_back(sample_slate(pool, c, stream));
      top.push_back(top_slate(pool, c));
    }
    EXPECT_GE(coverage(sampled), coverage(top));
  }
}

TEST(SlateIo, CsvRoundTripAndJsonShape) {
  const std::vector<Slate> slates{{3, {{10, 4.123456789}, {4, 4.0}}}, {5, {{2, 3.5}}}};
  const auto csv = slates_to_csv(slates);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "user_id,rank,item_id,score");
  const auto back = slates_from_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].user, 3u);
  EXPECT_EQ(back[0].items, slates[0].items);
  EXPECT_EQ(back[1].items, slates[1].items);
  const auto doc = nlohmann::json::parse(slates_to_json(slates));
  EXPECT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[0]["items"][0]["item_id"], 10);
  EXPECT_THROW(slates_from_csv("user_id,rank,item_id,score\n1,x,2,3\n"), DataError);
}

TEST(SlateIo, CoverageReportListsBothStrategies) {
  const auto doc = nlohmann::json::parse(coverage_json(95, 56, 120));
  ASSERT_EQ(doc.size(), 2u);
  EXPECT_EQ(doc[0]["strategy"], "sampled");
  EXPECT_EQ(doc[0]["distinct_items"], 95);
  EXPECT_EQ(doc[1]["strategy"], "top");
  EXPECT_EQ(doc[1]["catalog_size"], 120);
}

}  // namespace
}  // namespace irec::recommend
