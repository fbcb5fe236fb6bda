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

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "cfprox/counterfactual.hpp"

namespace cfprox {

enum class ScoreKind { kCf, kCfApprox, kItemSim, kGenreJacc };
inline constexpr std::array<ScoreKind, 4> kScoreKinds = {
    ScoreKind::kCf, ScoreKind::kCfApprox, ScoreKind::kItemSim,
    ScoreKind::kGenreJacc};

// "cf", "cf_approx", "item_sim", "genre_jacc".
std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view text);

enum class Level { kHigh, kMean, kLow };
inline constexpr std::array<Level, 3> kLevels = {Level::kHigh, Level::kMean,
                                                 Level::kLow};
std::string_view to_string(Level level);

// All k-subsets of a user's history, in lexicographic order of the sorted
// item ids.
struct CandidateSet {
  UserId user;
  ItemId recommended_item;
  std::size_t k;
  std::vector<Explanation> candidates;
};

// Throws DataError when k exceeds the history size or the history repeats
// an item.
CandidateSet enumerate_candidates(UserId user, std::span<const ItemId> history,
                                  ItemId recommended, std::size_t k);

struct ScoredExplanation {
  Explanation explanation;
  double score;
};

struct SelectionTriple {
  ScoreKind kind;
  Explanation high;
  Explanation mean;
  Explanation low;
  std::array<double, 3> scores;  // high, mean, low
};

// Highest, closest-to-mean and lowest scored candidates. Every tie goes to
// the lexicographically smallest item tuple.
SelectionTriple select_triple(std::span<const ScoredExplanation> scored,
                              ScoreKind kind);

// Per-item grouping used for the baselines: the k history items with the
// highest scores, the lowest scores, or the scores nearest the per-item
// mean. Ties go to the lower item id.
Explanation select_baseline_items(UserId user, ItemId recommended,
                                  std::span<const ItemId> history,
                                  const std::map<ItemId, double>& per_item,
                                  std::size_t k, Level level);

}  // namespace cfprox
