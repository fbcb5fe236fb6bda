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
#include <set>

#include "cfprox/explain.hpp"
#include "support.hpp"

namespace cfprox {
namespace {

using testing::I;
using testing::U;

std::vector<ItemId> ids(std::initializer_list<std::int64_t> v) {
  std::vector<ItemId> out;
  for (auto x : v) out.push_back(I(x));
  return out;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

TEST(Labels, RoundTrip) {
  for (ScoreKind kind : kScoreKinds) EXPECT_EQ(parse_score_kind(to_string(kind)), kind);
  EXPECT_EQ(to_string(Level::kMean), "mean");
  EXPECT_THROW(parse_score_kind("cosine"), DataError);
}

TEST(EnumerateCandidates, Counts) {
  const auto h = ids({11, 3, 7, 20, 5, 9, 1, 14, 8});
  EXPECT_EQ(enumerate_candidates(U(1), h, I(99), 3).candidates.size(), 84u);
  const auto whole = enumerate_candidates(U(1), h, I(99), 9).candidates;
  ASSERT_EQ(whole.size(), 1u);
  EXPECT_EQ(whole[0].items, ids({1, 3, 5, 7, 8, 9, 11, 14, 20}));
  EXPECT_EQ(enumerate_candidates(U(1), h, I(99), 1).candidates.size(), 9u);
  EXPECT_THROW(enumerate_candidates(U(1), h, I(99), 10), DataError);
  EXPECT_THROW(enumerate_candidates(U(1), ids({1, 1, 2}), I(99), 2), DataError);
}

TEST(EnumerateCandidates, LexicographicDistinctBinomial) {
  std::mt19937_64 rng(4);
  for (std::size_t n = 1; n <= 10; ++n) {
    std::vector<ItemId> h;
    std::set<std::int64_t> used;
    while (h.size() < n) {
      const auto v = static_cast<std::int64_t>(rng() % 1000);
      if (used.insert(v).second) h.push_back(I(v));
    }
    for (std::size_t k = 1; k <= n; ++k) {
      const auto c = enumerate_candidates(U(2), h, I(5000), k).candidates;
      ASSERT_EQ(c.size(), binomial(n, k));
      for (std::size_t j = 0; j < c.size(); ++j) {
        ASSERT_EQ(c[j].items.size(), k);
        ASSERT_TRUE(std::is_sorted(c[j].items.begin(), c[j].items.end()));
        if (j) ASSERT_LT(c[j - 1].items, c[j].items);
        ASSERT_EQ(c[j].user, U(2));
        ASSERT_EQ(c[j].recommended_item, I(5000));
      }
    }
  }
}

std::vector<ScoredExplanation> scored(const std::vector<double>& scores) {
  std::vector<ScoredExplanation> out;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out.push_back({{U(1), I(100), {I(static_cast<std::int64_t>(k + 1))}}, scores[k]});
  }
  return out;
}

TEST(SelectTriple, Examples) {
  const auto s = scored({0.9, 0.1, 0.5});
  const auto t = select_triple(s, ScoreKind::kCf);
  EXPECT_EQ(t.high.items, ids({1}));
  EXPECT_EQ(t.low.items, ids({2}));
  EXPECT_EQ(t.mean.items, ids({3}));
  EXPECT_EQ(t.scores, (std::array<double, 3>{0.9, 0.5, 0.1}));

  const auto flat = select_triple(scored({0.2, 0.2, 0.2}), ScoreKind::kCf);
  EXPECT_EQ(flat.high.items, ids({1}));
  EXPECT_EQ(flat.mean.items, ids({1}));
  EXPECT_EQ(flat.low.items, ids({1}));

  // Mean 0.5; items 2 and 3 are both 0.25 away.
  const auto eq = select_triple(scored({0.5, 0.25, 0.75, 0.5}), ScoreKind::kCf);
  EXPECT_EQ(eq.mean.items, ids({1}));
  const auto eq2 = select_triple(scored({1.0, 0.25, 0.75, 0.0}), ScoreKind::kCf);
  EXPECT_EQ(eq2.mean.items, ids({2}));
}

TEST(SelectTriple, OrderedAndPermutationInvariant) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> values(1 + rng() % 20);
    for (auto& v : values) v = static_cast<double>(rng() % 7) / 6.0 - 0.5;
    auto s = scored(values);
    const auto t = select_triple(s, ScoreKind::kCfApprox);
    ASSERT_GE(t.scores[0], t.scores[1]);
    ASSERT_GE(t.scores[1], t.scores[2]);
    std::shuffle(s.begin(), s.end(), rng);
    const auto u = select_triple(s, ScoreKind::kCfApprox);
    EXPECT_EQ(u.high, t.high);
    EXPECT_EQ(u.mean, t.mean);
    EXPECT_EQ(u.low, t.low);
  }
}

TEST(SelectBaselineItems, Examples) {
  const auto h = ids({1, 2, 3, 4, 5, 6, 7, 8, 9});
  std::map<ItemId, double> per_item;
  for (ItemId i : h) per_item[i] = static_cast<double>(raw(i));
  EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 3, Level::kHigh).items,
            ids({7, 8, 9}));
  EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 3, Level::kLow).items,
            ids({1, 2, 3}));
  // Mean 5: 5 is nearest, then 4 and 6 tie at distance 1.
  EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 3, Level::kMean).items,
            ids({4, 5, 6}));
  for (Level level : kLevels) {
    EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 9, level).items, h);
  }
  EXPECT_THROW(select_baseline_items(U(1), I(50), h, {}, 3, Level::kHigh), DataError);
}

TEST(SelectBaselineItems, TiesGoToLowerIds) {
  const auto h = ids({4, 2, 9, 7});
  const std::map<ItemId, double> per_item = {
      {I(2), 0.5}, {I(4), 0.5}, {I(7), 0.5}, {I(9), 0.1}};
  EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 2, Level::kHigh).items,
            ids({2, 4}));
  EXPECT_EQ(select_baseline_items(U(1), I(50), h, per_item, 2, Level::kLow).items,
            ids({2, 9}));
}

}  // namespace
}  // namespace cfprox
