#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "irec/bssmf/factor_model.hpp"
#include "irec/bssmf/fit.hpp"
#include "irec/bssmf/projection.hpp"
#include "irec/common/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

namespace irec::bssmf {
namespace {

using testing::random_model;
using testing::sample_entries;

// ---- box projection ----

TEST(ProjectBox, ClampsIntoRange) {
  const std::vector<double> v{0.2, 6.1, 3.0};
  EXPECT_EQ(project_box(v, 1.0, 5.0), (std::vector<double>{1.0, 5.0, 3.0}));
}

TEST(ProjectBox, InRangeIsUnchangedAndIdempotent) {
  const std::vector<double> v{1.0, 2.5, 5.0};
  EXPECT_EQ(project_box(v, 1.0, 5.0), v);
  const auto once = project_box(std::vector<double>{-3.0, 9.0}, 1.0, 5.0);
  EXPECT_EQ(project_box(once, 1.0, 5.0), once);
}

TEST(ProjectBox, DegenerateBox) {
  EXPECT_EQ(project_box(std::vector<double>{0.0, 2.0, 7.0}, 2.0, 2.0),
            (std::vector<double>{2.0, 2.0, 2.0}));
}

// ---- simplex projection ----

TEST(ProjectSimplex, EqualEntriesGiveUniform) {
  const auto h = project_simplex(std::vector<double>{0.5, 0.5, 0.5});
  for (const double x : h) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(ProjectSimplex, DimensionOneIsOne) {
  EXPECT_EQ(project_simplex(std::vector<double>{-42.0}), std::vector<double>{1.0});
  EXPECT_EQ(project_simplex(std::vector<double>{7.5}), std::vector<double>{1.0});
}

TEST(ProjectSimplex, VertexCaseMatchesOracleAndKkt) {
  const std::vector<double> v{2.0, 0.0, 0.0};
  const auto h = project_simplex(v);
  EXPECT_EQ(h, (std::vector<double>{1.0, 0.0, 0.0}));
  EXPECT_EQ(testing::simplex_oracle(v), h);
  // KKT with tau = 1: h_i = max(v_i - 1, 0).
  std::vector<double> scratch;
  EXPECT_DOUBLE_EQ(simplex_threshold(v, scratch), 1.0);
}

TEST(ProjectSimplex, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(project_simplex(std::vector<double>{1.0, NAN}), NonFiniteInput);
  EXPECT_THROW(project_simplex(std::vector<double>{INFINITY}), NonFiniteInput);
  EXPECT_THROW(project_simplex(std::vector<double>{}), NonFiniteInput);
}

TEST(ProjectSimplex, RandomVectorsMatchOracleAndKkt) {
  Rng rng(2024);
  std::vector<double> scratch;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = 1 + rng.index(8);
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform(-3.0, 3.0);
    const auto h = project_simplex(v);
    const auto expect = testing::simplex_oracle(v);
    for (std::size_t i = 0; i < d; ++i) ASSERT_NEAR(h[i], expect[i], 1e-9);
    const double tau = simplex_threshold(v, scratch);
    for (std::size_t i = 0; i < d; ++i) ASSERT_NEAR(h[i], std::max(v[i] - tau, 0.0), 1e-12);
    EXPECT_EQ(project_simplex(h), h);
  }
}

TEST(ProjectSimplex, CommutesWithPermutation) {
  Rng rng(8);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + rng.index(7);
    std::vector<double> v(d);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    std::vector<std::size_t> perm(d);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<double> pv(d);
    for (std::size_t k = 0; k < d; ++k) pv[k] = v[perm[k]];
    const auto h = project_simplex(v);
    const auto ph = project_simplex(pv);
    for (std::size_t k = 0; k < d; ++k) ASSERT_NEAR(ph[k], h[perm[k]], 1e-15);
  }
}

// ---- model, objective, rmse ----

FactorModel tiny_model(double w_value, std::vector<double> h_col) {
  const auto r = static_cast<Eigen::Index>(h_col.size());
  RowMatrix w = RowMatrix::Constant(3, r, w_value);
  Eigen::MatrixXd h(r, 1);
  for (Eigen::Index t = 0; t < r; ++t) h(t, 0) = h_col[static_cast<std::size_t>(t)];
  return FactorModel(w, h, 1.0, 5.0, {10, 11, 12}, {1});
}

TEST(Model, RejectsInfeasibleFactors) {
  EXPECT_FALSE(tiny_model(3.0, {0.5, 0.5}).invariant_violation().size());
  EXPECT_FALSE(tiny_model(6.0, {0.5, 0.5}).invariant_violation().empty());
  EXPECT_FALSE(tiny_model(3.0, {0.6, 0.5}).invariant_violation().empty());
  EXPECT_FALSE(tiny_model(3.0, {1.2, -0.2}).invariant_violation().empty());
}

TEST(Objective, PerfectModelIsZero) {
  Rng rng(1);
  const auto truth = random_model(8, 6, 3, rng);
  const auto data = sample_entries(truth, 0.6, 0.0, false, rng);
  EXPECT_NEAR(objective(data, truth), 0.0, 1e-20);
  EXPECT_NEAR(rmse(truth, data), 0.0, 1e-10);
}

TEST(Objective, SingleObservation) {
  const auto model = tiny_model(5.0, {1.0});
  const std::vector<Observation> data{{1, 10, 3.0}};
  EXPECT_DOUBLE_EQ(objective(data, model), 2.0);
}

TEST(Objective, MatchesDoubleLoop) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto truth = random_model(12, 9, 4, rng);
    const auto other = random_model(12, 9, 4, rng);
    const auto data = sample_entries(truth, 0.5, 0.3, true, rng);
    EXPECT_NEAR(objective(data, other), testing::objective_oracle(data, other), 1e-9);
    EXPECT_NEAR(rmse(other, data), testing::rmse_oracle(data, other), 1e-12);
  }
}

TEST(Objective, UnknownIdsAreDimensionErrors) {
  const auto model = tiny_model(3.0, {1.0});
  const std::vector<Observation> data{{2, 10, 3.0}};
  EXPECT_THROW(objective(data, model), DimensionMismatch);
  EXPECT_THROW(rmse(model, data), IndexOutOfRange);
}

TEST(Rmse, HandArithmetic) {
  const auto model = tiny_model(3.0, {1.0});
  const std::vector<Observation> data{{1, 10, 4.0}, {1, 11, 2.0}};
  EXPECT_DOUBLE_EQ(rmse(model, data), 1.0);
  EXPECT_THROW(rmse(model, std::span<const Observation>{}), EmptyInput);
}

// ---- prediction ----

TEST(Predict, ConstantWGivesConstantPredictions) {
  const auto model = tiny_model(5.0, {0.2, 0.3, 0.5});
  const auto p = predict(model, 0);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_EQ(p(i), 5.0);
}

TEST(Predict, VertexReturnsTypeColumn) {
  Rng rng(3);
  auto model = random_model(10, 4, 3, rng);
  model.H().col(2) = Eigen::Vector3d(0.0, 1.0, 0.0);
  const auto p = predict(model, 2);
  const auto col = user_type_scores(model, 1);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_EQ(p(i), col(i));
  EXPECT_THROW(predict(model, 4), IndexOutOfRange);
}

TEST(Predict, RandomModelsStayInRange) {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto model = random_model(6, 3, 1 + rng.index(6), rng);
    const auto p = predict(model, rng.index(3));
    ASSERT_GE(p.minCoeff(), 1.0);
    ASSERT_LE(p.maxCoeff(), 5.0);
  }
}

TEST(UserTypeScores, ColumnAccessAndRange) {
  Rng rng(4);
  const auto model = random_model(7, 3, 4, rng);
  const auto col = user_type_scores(model, 3);
  EXPECT_EQ(col.size(), 7);
  EXPECT_GE(col.minCoeff(), 1.0);
  EXPECT_LE(col.maxCoeff(), 5.0);
  EXPECT_THROW(user_type_scores(model, 4), IndexOutOfRange);
}

TEST(ModelJson, RoundTripIsBitExact) {
  Rng rng(21);
  const auto model = random_model(9, 7, 3, rng);
  const auto back = model_from_json(model_to_json(model));
  EXPECT_EQ(back.W(), model.W());
  EXPECT_EQ(back.H(), model.H());
  EXPECT_EQ(back.item_ids(), model.item_ids());
  EXPECT_EQ(back.user_ids(), model.user_ids());
  EXPECT_EQ(model_to_json(back), model_to_json(model));
}

TEST(ModelJson, InfeasibleDocumentIsRejected) {
  auto text = model_to_json(tiny_model(3.0, {0.5, 0.5}));
  const auto at = text.find("0.5");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 3, "0.9");
  EXPECT_THROW(model_from_json(text), DataError);
  EXPECT_THROW(model_from_json("{"), DataError);
}

// ---- fit ----

TEST(FitConfigCheck, RejectsBadFields) {
  FitConfig c;
  c.rank = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FitConfig{};
  c.rel_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FitConfig{};
  c.armijo.shrink = 1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FitConfig{};
  c.armijo.sufficient_decrease = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = FitConfig{};
  c.max_outer = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Fit, ConstantRatingsRankOne) {
  std::vector<Observation> data;
  for (UserId u = 1; u <= 6; ++u) {
    for (ItemId i = 1; i <= 5; ++i) {
      if ((u + i) % 3 != 0) data.push_back({u, i, 3.0});
    }
  }
  FitConfig c;
  c.rank = 1;
  const auto result = fit(data, c);
  EXPECT_LE(result.report.train_rmse, 1e-6);
  for (Eigen::Index i = 0; i < result.model.W().rows(); ++i) {
    EXPECT_NEAR(result.model.W()(i, 0), 3.0, 1e-6);
  }
}

TEST(Fit, PlantedSmallInstance) {
  Rng rng(7);
  const auto truth = random_model(40, 40, 3, rng);
  const auto data = sample_entries(truth, 1.0, 0.0, false, rng);
  FitConfig c;
  c.rank = 3;
  c.seed = 1;
  const auto result = fit(data, c);
  EXPECT_LE(result.report.train_rmse, 0.05);
  EXPECT_NEAR(result.report.train_rmse, rmse(result.model, data), 1e-12);
}

TEST(Fit, SameSeedIsBitIdentical) {
  Rng rng(17);
  const auto truth = random_model(30, 25, 4, rng);
  const auto data = sample_entries(truth, 0.5, 0.2, true, rng);
  FitConfig c;
  c.rank = 4;
  c.seed = 123;
  c.max_outer = 60;
  const auto a = fit(data, c);
  const auto b = fit(data, c);
  EXPECT_EQ(a.model.W(), b.model.W());
  EXPECT_EQ(a.model.H(), b.model.H());
  EXPECT_EQ(a.report.objective, b.report.objective);
}

TEST(Fit, ThreadCountDoesNotChangeResult) {
  Rng rng(18);
  const auto truth = random_model(30, 40, 3, rng);
  const auto data = sample_entries(truth, 0.5, 0.2, true, rng);
  FitConfig c;
  c.rank = 3;
  c.max_outer = 40;
  const auto one = fit(data, c);
  c.threads = 4;
  const auto four = fit(data, c);
  EXPECT_EQ(one.model.W(), four.model.W());
  EXPECT_EQ(one.model.H(), four.model.H());
}

TEST(Fit, EveryIterateFeasibleAndObjectiveMonotone) {
  Rng rng(31);
  const auto truth = random_model(25, 30, 5, rng);
  const auto data = sample_entries(truth, 0.4, 0.5, true, rng);
  FitConfig c;
  c.rank = 5;
  c.max_outer = 80;
  std::vector<double> seen;
  const auto result = fit(data, c, [&](const FitProgress& p) {
    ASSERT_EQ(p.model.invariant_violation(), "");
    EXPECT_NEAR(p.objective, testing::objective_oracle(data, p.model), 1e-8 * (1.0 + p.objective));
    seen.push_back(p.objective);
  });
  ASSERT_EQ(seen, result.report.objective);
  for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_LE(seen[k], seen[k - 1] + 1e-10);
  EXPECT_EQ(result.report.iterations + 1, seen.size());
}

TEST(Fit, StopsOnToleranceOrCap) {
  Rng rng(2);
  const auto truth = random_model(15, 15, 2, rng);
  const auto data = sample_entries(truth, 0.7, 0.3, false, rng);
  FitConfig c;
  c.rank = 2;
  c.max_outer = 3;
  c.rel_tol = 1e-300;
  EXPECT_EQ(fit(data, c).report.stop, StopReason::cap);
  EXPECT_EQ(fit(data, c).report.iterations, 3u);
  c.max_outer = 500;
  c.rel_tol = 1e-2;
  const auto loose = fit(data, c);
  EXPECT_EQ(loose.report.stop, StopReason::tolerance);
  EXPECT_LT(loose.report.iterations, 500u);
}

TEST(Fit, ItemWithoutRatingsIsDegenerate) {
  const std::vector<Observation> data{{1, 1, 3.0}, {2, 2, 4.0}};
  const std::vector<ItemId> items{1, 2, 3};
  FitConfig c;
  c.rank = 1;
  EXPECT_THROW(fit(data, c, {}, items), DegenerateData);
  EXPECT_THROW(fit(std::span<const Observation>{}, c), DegenerateData);
}

TEST(Fit, RankTrendOnNoisyData) {
  Rng rng(5);
  const auto truth = random_model(80, 80, 6, rng);
  const auto data = sample_entries(truth, 0.4, 0.4, true, rng);
  double previous = INFINITY;
  for (const std::size_t r : {3, 5, 10}) {
    FitConfig c;
    c.rank = r;
    c.seed = 3;
    const double train = fit(data, c).report.train_rmse;
    EXPECT_LE(train, previous);
    previous = train;
  }
}

TEST(Fit, ReportJsonHasTrajectory) {
  Rng rng(6);
  const auto truth = random_model(10, 10, 2, rng);
  const auto data = sample_entries(truth, 0.8, 0.0, false, rng);
  FitConfig c;
  c.rank = 2;
  const auto result = fit(data, c);
  const auto json = report_to_json(result.report, c);
  EXPECT_NE(json.find("\"objective\""), std::string::npos);
  EXPECT_NE(json.find("\"stop_reason\""), std::string::npos);
}

}  // namespace
}  // namespace irec::bssmf
