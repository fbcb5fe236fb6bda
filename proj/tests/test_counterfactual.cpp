// Copyright 2026 The cfprox Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cfprox/counterfactual.hpp"
#include "cfprox/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cfprox {
namespace {

using testing::brute_force_cf;
using testing::I;
using testing::toy;
using testing::U;

InteractionDataset small_synthetic(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.users = 50;
  spec.items = 100;
  spec.ratings = 1200;
  spec.min_per_user = 8;
  spec.seed = seed;
  return make_synthetic(spec);
}

Explanation random_explanation(std::mt19937_64& rng, const InteractionDataset& ds,
                               UserId user, ItemId rec) {
  auto hist = ds.items_of(user);
  std::shuffle(hist.begin(), hist.end(), rng);
  hist.resize(1 + rng() % std::min<std::size_t>(hist.size(), 4));
  std::sort(hist.begin(), hist.end());
  return {user, rec, hist};
}

CounterfactualContext hand_context(const std::vector<double>& raw_scores, ItemId rec) {
  CounterfactualContext ctx;
  ctx.user = U(1);
  ctx.recommended_item = rec;
  for (std::size_t k = 0; k < raw_scores.size(); ++k) {
    ctx.cf_candidates.push_back(I(static_cast<std::int64_t>(k + 1)));
  }
  ctx.base_candidates = ctx.cf_candidates;
  ctx.raw_scores = raw_scores;
  ctx.normalized_scores = normalize_scores(raw_scores);
  return ctx;
}

TEST(Strategy, ParseAndPrint) {
  EXPECT_EQ(parse_strategy("full-retrain"), CfStrategy::kFullRetrain);
  EXPECT_EQ(parse_strategy("warm-start-finetune"), CfStrategy::kWarmStartFinetune);
  EXPECT_EQ(to_string(CfStrategy::kWarmStartFinetune), "warm-start-finetune");
  EXPECT_THROW(parse_strategy("retrain"), ConfigError);
}

TEST(Explanation, Validation) {
  const auto ds = toy(1, 4, {{1, 1, 4.0}, {1, 2, 4.0}});
  EXPECT_NO_THROW(validate_explanation(ds, {U(1), I(3), {I(1), I(2)}}));
  EXPECT_THROW(validate_explanation(ds, {U(1), I(3), {I(1), I(4)}}), ValidationError);
  EXPECT_THROW(validate_explanation(ds, {U(1), I(2), {I(1)}}), ValidationError);
  EXPECT_THROW(validate_explanation(ds, {U(1), I(3), {I(2), I(1)}}), ValidationError);
  EXPECT_THROW(validate_explanation(ds, {U(2), I(3), {I(1)}}), ValidationError);
}

TEST(EvaluateContext, HandBuiltDisplacement) {
  // Normalized scores: i (item 1) 0.3, item 2 1.0, the rest lower.
  const auto ctx = hand_context({0.3, 1.0, 0.0, 0.1}, I(1));
  const auto r = evaluate_context(ctx, CfStrategy::kFullRetrain);
  EXPECT_DOUBLE_EQ(r.score, 0.7);
  EXPECT_TRUE(r.qualitative);
  EXPECT_EQ(r.benchmark_item, I(2));
  EXPECT_TRUE(cf_qualitative(ctx, I(1)));
}

TEST(EvaluateContext, HandBuiltRetained) {
  const auto ctx = hand_context({1.0, 0.8, 0.0, 0.5}, I(1));
  const auto r = evaluate_context(ctx, CfStrategy::kFullRetrain);
  EXPECT_DOUBLE_EQ(r.score, -0.2);
  EXPECT_FALSE(r.qualitative);
  EXPECT_EQ(r.benchmark_item, I(2));
  EXPECT_FALSE(cf_qualitative(ctx, I(1)));
}

TEST(EvaluateContext, ConstantScoresAreNeutral) {
  const auto ctx = hand_context({2.0, 2.0, 2.0}, I(2));
  const auto r = evaluate_context(ctx, CfStrategy::kFullRetrain);
  EXPECT_EQ(r.score, 0.0);
  EXPECT_FALSE(r.qualitative);
  EXPECT_EQ(r.benchmark_item, I(1));
}

TEST(CfQualitative, Examples) {
  EXPECT_FALSE(cf_qualitative(hand_context({0.1, 0.9, 0.5}, I(2)), I(2)));
  EXPECT_TRUE(cf_qualitative(hand_context({0.1, 0.5, 0.9}, I(2)), I(2)));
  // Exact tie with a lower id: the lower id takes the argmax.
  EXPECT_TRUE(cf_qualitative(hand_context({0.9, 0.9, 0.1}, I(2)), I(2)));
  EXPECT_THROW(cf_qualitative(hand_context({0.1, 0.2}, I(1)), I(7)), DataError);
}

TEST(Recommend, ArgmaxOverUnseenItems) {
  const auto ds = toy(1, 4, {{1, 1, 4.0}});
  FactorMatrix p(1, 1), q(4, 1);
  p << 1.0;
  q << 9.0, 2.0, 3.0, 3.0;
  TrainConfig c;
  c.embedding_dim = 1;
  const FactorModel m({U(1)}, {I(1), I(2), I(3), I(4)}, p, q, c);
  EXPECT_EQ(recommend(ds, m, U(1)), I(3));
}

TEST(CfRetrain, EmptyRemovalReproducesBase) {
  const auto ds = small_synthetic(4);
  const auto c = testing::small_config(6, 8);
  const auto base = train(ds, c);
  const UserId u = ds.users()[3];
  const auto cf = cf_retrain(ds, c, {u, recommend(ds, base, u), {}});
  EXPECT_TRUE((cf.user_factors().array() == base.user_factors().array()).all());
  EXPECT_TRUE((cf.item_factors().array() == base.item_factors().array()).all());
}

TEST(CfRetrain, MatchesTrainingOnHandReducedDataset) {
  const auto ds = toy(3, 4, {{1, 1, 5.0}, {1, 2, 3.0}, {2, 2, 4.0}, {2, 3, 1.0},
                             {3, 1, 2.0}, {3, 4, 4.5}});
  const auto reduced = toy(3, 4, {{1, 2, 3.0}, {2, 2, 4.0}, {2, 3, 1.0},
                                  {3, 1, 2.0}, {3, 4, 4.5}});
  const auto c = testing::small_config(2, 10);
  const auto cf = cf_retrain(ds, c, {U(1), I(3), {I(1)}});
  const auto direct = train(reduced, c);
  EXPECT_TRUE((cf.user_factors().array() == direct.user_factors().array()).all());
  EXPECT_TRUE((cf.item_factors().array() == direct.item_factors().array()).all());
}

TEST(CfRetrain, ForgettingEverythingLeavesRegularizedFactor) {
  const auto ds = toy(2, 3, {{1, 1, 5.0}, {2, 1, 4.0}, {2, 2, 3.0}});
  auto c = testing::small_config(2, 5);
  c.regularization = 100.0;
  const auto cf = cf_retrain(ds, c, {U(1), I(3), {I(1)}});
  EXPECT_EQ(cf.user_factor(U(1)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(CfFinetune, IdempotentAndIsolated) {
  const auto ds = small_synthetic(5);
  const auto c = testing::small_config(6, 8);
  const auto base = train(ds, c);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const UserId u = ds.users()[rng() % ds.users().size()];
    const auto expl = random_explanation(rng, ds, u, recommend(ds, base, u));
    const auto one = cf_finetune(base, ds, expl, 1);
    const auto five = cf_finetune(base, ds, expl, 5);
    EXPECT_LE((one.user_factor(u) - five.user_factor(u)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE((five.item_factors().array() == base.item_factors().array()).all());
    for (UserId other : ds.users()) {
      if (other == u) continue;
      ASSERT_TRUE((five.user_factor(other).array() == base.user_factor(other).array()).all());
    }
  }
}

TEST(CfFinetune, ScalarRidgeByHand) {
  // d = 1; after forgetting item 2 the user keeps one rating r = 4 on an
  // item with factor q = 2, so p = r q / (q^2 + lambda).
  const auto ds = toy(1, 3, {{1, 1, 4.0}, {1, 2, 1.0}});
  FactorMatrix p(1, 1), q(3, 1);
  p << 0.7;
  q << 2.0, -1.0, 0.5;
  TrainConfig c;
  c.embedding_dim = 1;
  c.regularization = 0.5;
  const FactorModel base({U(1)}, {I(1), I(2), I(3)}, p, q, c);
  const auto cf = cf_finetune(base, ds, {U(1), I(3), {I(2)}}, 5);
  EXPECT_NEAR(cf.user_factor(U(1))(0), 8.0 / 4.5, 1e-15);
  const auto all = cf_finetune(base, ds, {U(1), I(3), {I(1), I(2)}}, 5);
  EXPECT_EQ(all.user_factor(U(1))(0), 0.0);
}

TEST(CfFinetune, EmptyRemovalIsTheUserFixedPoint) {
  const auto ds = small_synthetic(6);
  const auto c = testing::small_config(5, 6);
  const auto base = train(ds, c);
  const UserId u = ds.users()[7];
  const auto cf = cf_finetune(base, ds, {u, recommend(ds, base, u), {}}, 5);
  std::vector<std::pair<ItemId, double>> hist;
  for (const auto& row : ds.interactions_of(u)) hist.emplace_back(row.item, row.rating);
  EXPECT_LE((cf.user_factor(u) - fold_in_user(base, hist, c.regularization))
                .cwiseAbs()
                .maxCoeff(),
            1e-12);
  EXPECT_TRUE((cf.item_factors().array() == base.item_factors().array()).all());
}

TEST(CfScore, EmptyRemovalCannotDisplace) {
  const auto ds = small_synthetic(7);
  const auto c = testing::small_config(6, 8);
  const auto base = train(ds, c);
  for (std::size_t k = 0; k < 5; ++k) {
    const UserId u = ds.users()[k * 9];
    const Explanation expl{u, recommend(ds, base, u), {}};
    const auto full = cf_score(ds, c, base, expl, CfStrategy::kFullRetrain);
    const auto warm = cf_score(ds, c, base, expl, CfStrategy::kWarmStartFinetune);
    EXPECT_LE(full.score, 0.0);
    EXPECT_FALSE(full.qualitative);
    EXPECT_NE(full.benchmark_item, expl.recommended_item);
    EXPECT_GE(warm.score, -1.0);
  }
}

TEST(CfScore, RejectsWrongRecommendation) {
  const auto ds = small_synthetic(8);
  const auto c = testing::small_config(4, 4);
  const auto base = train(ds, c);
  const UserId u = ds.users()[0];
  const ItemId rec = recommend(ds, base, u);
  const auto unseen = ds.items_not_of(u);
  const ItemId wrong = unseen.front() == rec ? unseen[1] : unseen.front();
  EXPECT_THROW(cf_score(ds, c, base, {u, wrong, {}}, CfStrategy::kFullRetrain),
               ValidationError);
}

// Randomized (user, explanation) pairs: range, sign semantics and the
// brute-force oracle, for both strategies.
TEST(CfScore, PropertiesAgainstBruteForceOracle) {
  const auto ds = small_synthetic(9);
  const auto c = testing::small_config(8, 10);
  const auto base = train(ds, c);
  std::mt19937_64 rng(77);
  const FullRetrainProvider full(c);
  const WarmStartFinetuneProvider warm(5);
  for (int trial = 0; trial < 60; ++trial) {
    const UserId u = ds.users()[rng() % ds.users().size()];
    const auto expl = random_explanation(rng, ds, u, recommend(ds, base, u));
    for (const CounterfactualProvider* provider :
         {static_cast<const CounterfactualProvider*>(&full),
          static_cast<const CounterfactualProvider*>(&warm)}) {
      CounterfactualContext ctx;
      TrainTrace trace;
      const auto r = cf_score(ds, base, expl, *provider, &trace, &ctx);
      ASSERT_GE(r.score, -1.0);
      ASSERT_LE(r.score, 1.0);
      EXPECT_EQ(r.qualitative, r.score > 0.0);
      EXPECT_EQ(r.qualitative, cf_qualitative(ctx, expl.recommended_item));
      EXPECT_NE(r.benchmark_item, expl.recommended_item);
      EXPECT_EQ(r.strategy, provider->strategy());

      const auto oracle = brute_force_cf(ds, *ctx.cf_model, expl);
      EXPECT_EQ(r.score, oracle.score);
      EXPECT_EQ(r.benchmark_item, oracle.benchmark);
      EXPECT_EQ(r.qualitative, oracle.displaced);

      // I_u^{-cf} is exactly I_u^- plus E.
      auto expected = ds.items_not_of(u);
      expected.insert(expected.end(), expl.items.begin(), expl.items.end());
      std::sort(expected.begin(), expected.end());
      EXPECT_EQ(ctx.cf_candidates, expected);
      EXPECT_EQ(ctx.normalized_scores.size(), expected.size());
      if (provider == &full) EXPECT_EQ(objective_increases(trace), 0u);
    }
  }
}

}  // namespace
}  // namespace cfprox
