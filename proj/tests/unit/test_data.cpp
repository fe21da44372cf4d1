#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "irec/common/files.hpp"
#include "irec/common/rng.hpp"
#include "irec/data/catalog.hpp"
#include "irec/data/curate.hpp"
#include "irec/data/holdout.hpp"
#include "irec/data/likert.hpp"
#include "irec/data/metadata_client.hpp"
#include "irec/data/ratings.hpp"
#include "support/temp_dir.hpp"

namespace irec::data {
namespace {

// ---- catalog ----

TEST(Catalog, ParsesCanonicalLayout) {
  const auto parsed = parse_catalog_text(
      "movieId,title,genres,year\n"
      "1,Toy Story,Animation|Comedy,1995\n"
      "2,\"Heat, The\",,1995\n");
  ASSERT_EQ(parsed.catalog.size(), 2u);
  const Item& toy = parsed.catalog.at(1);
  EXPECT_EQ(toy.title, "Toy Story");
  EXPECT_EQ(toy.genres, (std::vector<std::string>{"Animation", "Comedy"}));
  EXPECT_EQ(toy.year, 1995);
  EXPECT_EQ(parsed.catalog.at(2).title, "Heat, The");
  EXPECT_TRUE(parsed.catalog.at(2).genres.empty());
}

TEST(Catalog, ReadsYearFromMovieLensTitles) {
  const auto parsed = parse_catalog_text(
      "movieId,title,genres\n"
      "1,Toy Story (1995),Adventure|Animation\n"
      "2,Untitled,Drama\n"
      "3,Film (no genres listed) (2003),(no genres listed)\n");
  EXPECT_EQ(parsed.catalog.size(), 2u);
  EXPECT_EQ(parsed.skipped, 1u);
  EXPECT_EQ(parsed.catalog.at(1).year, 1995);
  EXPECT_EQ(parsed.catalog.at(1).title, "Toy Story");
}

TEST(Catalog, RejectsDuplicatesAndAncientYears) {
  EXPECT_THROW(parse_catalog_text("movieId,title,genres,year\n1,A,,2000\n1,B,,2001\n"),
               MalformedRow);
  try {
    parse_catalog_text("movieId,title,genres,year\n1,A,,2000\n2,B,,1850\n");
    FAIL();
  } catch (const MalformedRow& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_catalog_text(""), EmptyFile);
}

TEST(Catalog, SerializeRoundTrips) {
  ItemCatalog c;
  c.add({7, "Amélie, le fabuleux destin", {"Comédie", "Romance"}, 2001});
  c.add({9, "Sans genre", {}, 1999});
  const auto again = parse_catalog_text(serialize_catalog(c)).catalog;
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again.at(7).title, c.at(7).title);
  EXPECT_EQ(again.at(7).genres, c.at(7).genres);
  EXPECT_TRUE(again.at(9).genres.empty());
}

// ---- ratings ----

TEST(Ratings, ThreeRowFile) {
  const auto parsed = parse_ratings_text(
      "userId,movieId,rating,timestamp\n1,10,4.0,0\n1,11,3.0,0\n2,10,5.0,0\n");
  EXPECT_EQ(parsed.dataset.size(), 3u);
  EXPECT_EQ(parsed.dropped_duplicates, 0u);
  EXPECT_EQ(parsed.dataset.n_users(), 2u);
  EXPECT_EQ(parsed.dataset.n_items(), 2u);
}

TEST(Ratings, HalfStarsRoundUp) {
  const auto parsed = parse_ratings_text("userId,movieId,rating\n1,10,4.5\n1,11,0.5\n1,12,2.5\n");
  const auto t = parsed.dataset.triples();
  EXPECT_EQ(t[0].value, 5);
  EXPECT_EQ(t[1].value, 1);
  EXPECT_EQ(t[2].value, 3);
  EXPECT_EQ(round_rating(3.4), 3);
}

TEST(Ratings, DuplicateKeepsLastOccurrence) {
  const auto parsed = parse_ratings_text("userId,movieId,rating\n1,10,2\n1,10,5\n");
  ASSERT_EQ(parsed.dataset.size(), 1u);
  EXPECT_EQ(parsed.dataset.triples()[0].value, 5);
  EXPECT_EQ(parsed.dropped_duplicates, 1u);
}

TEST(Ratings, MalformedRowsCarryLineNumbers) {
  try {
    parse_ratings_text("userId,movieId,rating\n1,10,4\n1,x,4\n");
    FAIL();
  } catch (const MalformedRow& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_ratings_text("userId,movieId,rating\n1,10,7\n"), MalformedRow);
  EXPECT_THROW(parse_ratings_text(""), EmptyFile);
}

TEST(Ratings, ParseSerializeKeepsIntegerScale) {
  Rng rng(4);
  std::string text = "userId,movieId,rating,timestamp\n";
  for (int u = 1; u <= 20; ++u) {
    for (int i = 1; i <= 15; ++i) {
      text += std::to_string(u) + "," + std::to_string(i) + "," +
              std::to_string(0.5 * static_cast<double>(1 + rng.index(10))) + ",0\n";
    }
  }
  const auto first = parse_ratings_text(text).dataset;
  const auto again = parse_ratings_text(serialize_ratings(first)).dataset;
  EXPECT_EQ(first, again);
  for (const auto& r : again.triples()) {
    EXPECT_GE(r.value, 1);
    EXPECT_LE(r.value, 5);
  }
}

ItemCatalog small_catalog() {
  ItemCatalog c;
  for (ItemId i = 1; i <= 5; ++i) c.add({i, "Movie " + std::to_string(i), {"Drama"}, 2000});
  return c;
}

TEST(Merge, ShiftsSecondDatasetUsers) {
  const RatingDataset a({{1, 1, 4}, {2, 2, 3}});
  const RatingDataset b({{1, 3, 5}});
  const auto merged = merge_datasets(a, b, 100, small_catalog());
  EXPECT_EQ(merged.n_users(), 3u);
  EXPECT_EQ(merged.user_ids().back(), 101);
  EXPECT_EQ(merged.ratings_of(101)[0].item, 3);
}

TEST(Merge, EmptySecondIsIdentity) {
  const RatingDataset a({{1, 1, 4}, {2, 2, 3}});
  EXPECT_EQ(merge_datasets(a, RatingDataset{}, 100, small_catalog()), a);
}

TEST(Merge, UnknownItemIsRejected) {
  const RatingDataset a({{1, 1, 4}});
  const RatingDataset b({{1, 99, 5}});
  EXPECT_THROW(merge_datasets(a, b, 100, small_catalog()), ItemMismatch);
  EXPECT_THROW(merge_datasets(a, RatingDataset({{1, 2, 5}}), 0, small_catalog()), DataError);
}

// ---- holdout ----

RatingDataset user_with(UserId user, int count) {
  std::vector<Rating> rows;
  for (int i = 1; i <= count; ++i) rows.push_back({user, i, 1 + i % 5});
  return RatingDataset(rows);
}

TEST(Holdout, TwelveRatingsGiveFiveTest) {
  const auto split = split_holdout(user_with(1, 12), {5, 10, 3});
  EXPECT_EQ(split.test.size(), 5u);
  EXPECT_EQ(split.train.size(), 7u);
}

TEST(Holdout, TenRatingsStayInTrain) {
  const auto split = split_holdout(user_with(1, 10), {5, 10, 3});
  EXPECT_TRUE(split.test.empty());
  EXPECT_EQ(split.train.size(), 10u);
}

TEST(Holdout, SameSeedSameSplit) {
  const auto data = user_with(1, 40);
  const auto a = split_holdout(data, {5, 10, 9});
  const auto b = split_holdout(data, {5, 10, 9});
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train, b.train);
}

TEST(Holdout, PartitionAndEligibilityOnRandomData) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng(seed);
    std::vector<Rating> rows;
    for (UserId u = 1; u <= 30; ++u) {
      const std::size_t count = 1 + rng.index(25);
      std::vector<ItemId> items(40);
      std::iota(items.begin(), items.end(), ItemId{1});
      for (std::size_t k = 0; k < count; ++k) {
        std::swap(items[k], items[k + rng.index(items.size() - k)]);
        rows.push_back({u, items[k], static_cast<int>(1 + rng.index(5))});
      }
    }
    const RatingDataset data(rows);
    const auto split = split_holdout(data, {5, 10, seed});

    std::vector<Rating> together(split.train.triples().begin(), split.train.triples().end());
    together.insert(together.end(), split.test.begin(), split.test.end());
    std::sort(together.begin(), together.end());
    std::vector<Rating> source(data.triples().begin(), data.triples().end());
    ASSERT_EQ(together, source);  // union is the source, and no triple is counted twice

    std::map<UserId, std::size_t> test_count;
    for (const auto& r : split.test) ++test_count[r.user];
    for (const auto& [user, n] : test_count) {
      EXPECT_EQ(n, 5u);
      EXPECT_GT(data.ratings_of(user).size(), 10u);
    }
    for (const UserId user : data.user_ids()) {
      if (data.ratings_of(user).size() > 10) {
        EXPECT_EQ(test_count[user], 5u);
      }
    }
  }
}

TEST(Holdout, ManifestRoundTrips) {
  const auto data = user_with(1, 30);
  const HoldoutOptions options{5, 10, 77};
  const auto split = split_holdout(data, options);
  const auto again = split_from_manifest(data, split_manifest_json(split, options));
  EXPECT_EQ(again.test, split.test);
  EXPECT_EQ(again.train, split.train);
  EXPECT_THROW(split_from_manifest(user_with(2, 30), split_manifest_json(split, options)),
               DataError);
}

TEST(Holdout, RejectsZeroPerUser) {
  EXPECT_THROW(split_holdout(user_with(1, 12), {0, 10, 0}), std::invalid_argument);
}

// ---- curation ----

TEST(Curate, ZeroDecayIsPopularity) {
  ItemCatalog c;
  c.add({1, "a", {}, 1950});
  c.add({2, "b", {}, 2020});
  c.add({3, "c", {}, 2000});
  const RatingDataset d({{1, 1, 3}, {2, 1, 3}, {3, 1, 3}, {1, 2, 3}, {1, 3, 3}, {2, 3, 3}});
  EXPECT_EQ(curate_catalog(d, c, {2, 0.0, 2025}), (std::vector<ItemId>{1, 3}));
}

TEST(Curate, NewerWinsAtEqualCount) {
  const std::vector<CurationCandidate> cands{{1, 50.0, 2000}, {2, 50.0, 2020}};
  EXPECT_EQ(rank_by_weight(cands, 0.05, 2025), (std::vector<ItemId>{2, 1}));
}

TEST(Curate, HandEvaluatedTieGoesToLowerId) {
  // 100 ratings in 2020 against 100e ratings thirty years earlier, decay 1/30
  // per year: both weigh 100 exp(-(2025 - 2020) / 30).
  const double e = std::exp(1.0);
  const double w_new = 100.0 * std::exp(-5.0 / 30.0);
  const double w_old = 100.0 * e * std::exp(-35.0 / 30.0);
  ASSERT_NEAR(w_new, w_old, 1e-10);
  EXPECT_NEAR(curation_weight(100.0, 2020, 1.0 / 30.0, 2025), w_new, 1e-12);
  EXPECT_NEAR(curation_weight(100.0 * e, 1990, 1.0 / 30.0, 2025), w_old, 1e-12);
  const std::vector<CurationCandidate> a{{5, 100.0, 2020}, {3, 100.0 * e, 1990}};
  EXPECT_EQ(rank_by_weight(a, 1.0 / 30.0, 2025), (std::vector<ItemId>{3, 5}));
  const std::vector<CurationCandidate> b{{3, 100.0, 2020}, {5, 100.0 * e, 1990}};
  EXPECT_EQ(rank_by_weight(b, 1.0 / 30.0, 2025), (std::vector<ItemId>{3, 5}));
}

TEST(Curate, MoreRatingsNeverLowerRank) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CurationCandidate> cands;
    for (ItemId i = 1; i <= 12; ++i) {
      cands.push_back({i, static_cast<double>(rng.index(200)), 1980 + static_cast<int>(rng.index(45))});
    }
    // Item 1 and item 2 are identical except for item 1's extra ratings.
    cands[1].year = cands[0].year;
    cands[1].count = cands[0].count;
    cands[0].count += 1.0 + static_cast<double>(rng.index(20));
    const auto order = rank_by_weight(cands, 0.05, 2025);
    const auto pos = [&](ItemId id) { return std::find(order.begin(), order.end(), id) - order.begin(); };
    EXPECT_LT(pos(1), pos(2));
  }
}

TEST(Curate, TooFewItems) {
  EXPECT_THROW(curate_catalog(RatingDataset{}, small_catalog(), {6, 0.05, 2025}), InsufficientItems);
}

// ---- Likert ----

TEST(Likert, OpinionScale) {
  const auto& s = LikertScale::opinion();
  EXPECT_EQ(likert_to_score("I really like it", s), 5);
  EXPECT_EQ(likert_to_score("I like it", s), 4);
  EXPECT_EQ(likert_to_score("It's okay", s), 3);
  EXPECT_EQ(likert_to_score("It’s okay", s), 3);
  EXPECT_EQ(likert_to_score("I don't like it much", s), 2);
  EXPECT_EQ(likert_to_score("I really don't like it", s), 1);
  EXPECT_THROW(likert_to_score("meh", s), UnknownLabel);
}

TEST(Likert, BijectionOntoOneToFive) {
  for (const auto* scale : {&LikertScale::opinion(), &LikertScale::agreement()}) {
    for (int v = 1; v <= 5; ++v) EXPECT_EQ(scale->score(scale->label(v)), v);
  }
}

// ---- metadata ----

class FakeTmdb {
 public:
  FakeTmdb() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeTmdb() {
    server_.stop();
    thread_.join();
  }
  httplib::Server& server() { return server_; }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/3"; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

MetadataConfig fast_config(const std::string& endpoint) {
  MetadataConfig c;
  c.endpoint = endpoint;
  c.api_key = "test-key";
  c.backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

TEST(Metadata, MatchedItemIsFilledFromPayload) {
  FakeTmdb tmdb;
  const std::string payload = read_file(IREC_SOURCE_DIR "/tests/fixtures/tmdb_movie_603.json");
  std::string seen_auth;
  std::string seen_language;
  std::mutex mu;
  tmdb.server().Get("/3/movie/603", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    seen_auth = req.get_header_value("Authorization");
    seen_language = req.get_param_value("language");
    res.set_content(payload, "application/json");
  });
  ItemCatalog c;
  c.add({2571, "", {}, 1999});
  const auto out = enrich_metadata(c, {{2571, 603}}, fast_config(tmdb.endpoint()));
  EXPECT_EQ(out.catalog.at(2571).title, "Matrix");
  EXPECT_EQ(out.catalog.at(2571).genres, (std::vector<std::string>{"Action", "Science-Fiction"}));
  EXPECT_TRUE(out.unmatched.empty());
  EXPECT_EQ(seen_auth, "Bearer test-key");
  EXPECT_EQ(seen_language, "fr-FR");
}

TEST(Metadata, CompleteItemsAreUntouched) {
  FakeTmdb tmdb;
  int calls = 0;
  tmdb.server().Get(R"(/3/movie/(\d+))", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.set_content(R"({"title":"Other","genres":[{"name":"X"}]})", "application/json");
  });
  ItemCatalog c;
  c.add({1, "Kept", {"Drama"}, 2000});
  c.add({2, "Has title", {}, 2000});
  const auto out = enrich_metadata(c, {{1, 10}, {2, 20}}, fast_config(tmdb.endpoint()));
  EXPECT_EQ(out.catalog.at(1).title, "Kept");
  EXPECT_EQ(out.catalog.at(1).genres, (std::vector<std::string>{"Drama"}));
  EXPECT_EQ(out.catalog.at(2).title, "Has title");  // additive: existing title stays
  EXPECT_EQ(out.catalog.at(2).genres, (std::vector<std::string>{"X"}));
  EXPECT_EQ(calls, 1);
}

TEST(Metadata, UnauthorizedIsAuthFailure) {
  FakeTmdb tmdb;
  tmdb.server().Get(R"(/3/movie/(\d+))", [](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
  });
  ItemCatalog c;
  c.add({1, "", {}, 2000});
  EXPECT_THROW(enrich_metadata(c, {{1, 10}}, fast_config(tmdb.endpoint())), AuthFailure);
}

TEST(Metadata, RateLimitIsRetriedThenGivesUp) {
  FakeTmdb tmdb;
  std::atomic<int> calls{0};
  tmdb.server().Get(R"(/3/movie/(\d+))", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ < 2) {
      res.status = 429;
      return;
    }
    res.set_content(R"({"title":"Enfin","genres":[]})", "application/json");
  });
  ItemCatalog c;
  c.add({1, "", {}, 2000});
  const auto out = enrich_metadata(c, {{1, 10}}, fast_config(tmdb.endpoint()));
  EXPECT_EQ(out.catalog.at(1).title, "Enfin");
  EXPECT_EQ(calls.load(), 3);

  FakeTmdb always;
  always.server().Get(R"(/3/movie/(\d+))", [](const httplib::Request&, httplib::Response& res) {
    res.status = 429;
  });
  EXPECT_THROW(enrich_metadata(c, {{1, 10}}, fast_config(always.endpoint())), RateLimited);
}

TEST(Metadata, UnmatchedItemsAreKeptAndListed) {
  FakeTmdb tmdb;
  tmdb.server().Get(R"(/3/movie/(\d+))", [](const httplib::Request&, httplib::Response& res) {
    res.status = 404;
  });
  ItemCatalog c;
  c.add({1, "", {}, 2000});
  c.add({2, "", {}, 2000});
  const auto out = enrich_metadata(c, {{1, 10}}, fast_config(tmdb.endpoint()));
  EXPECT_EQ(out.catalog.size(), 2u);
  EXPECT_EQ(out.unmatched, (std::vector<ItemId>{1, 2}));
}

TEST(Metadata, NetworkFailureAndEmptyKey) {
  ItemCatalog c;
  c.add({1, "", {}, 2000});
  auto config = fast_config("http://127.0.0.1:1/3");
  EXPECT_THROW(enrich_metadata(c, {{1, 10}}, config), NetworkError);
  config.api_key.clear();
  EXPECT_THROW(enrich_metadata(c, {{1, 10}}, config), AuthFailure);
}

TEST(Metadata, LinksUseLastColumn) {
  const auto links = parse_links_text("movieId,imdbId,tmdbId\n1,0114709,862\n2,0113497,\n");
  EXPECT_EQ(links.size(), 1u);
  EXPECT_EQ(links.at(1), 862);
}

}  // namespace
}  // namespace irec::data
