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

#include "cfprox/explain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace cfprox {

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::kCf: return "cf";
    case ScoreKind::kCfApprox: return "cf_approx";
    case ScoreKind::kItemSim: return "item_sim";
    case ScoreKind::kGenreJacc: return "genre_jacc";
  }
  return "unknown";
}

ScoreKind parse_score_kind(std::string_view text) {
  for (ScoreKind kind : kScoreKinds) {
    if (to_string(kind) == text) return kind;
  }
  throw DataError("unknown score kind `" + std::string(text) + "`");
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kHigh: return "high";
    case Level::kMean: return "mean";
    case Level::kLow: return "low";
  }
  return "unknown";
}

CandidateSet enumerate_candidates(UserId user, std::span<const ItemId> history,
                                  ItemId recommended, std::size_t k) {
  std::vector<ItemId> items(history.begin(), history.end());
  std::sort(items.begin(), items.end());
  if (std::adjacent_find(items.begin(), items.end()) != items.end()) {
    throw DataError("history repeats an item");
  }
  if (k > items.size()) {
    throw DataError("explanation size " + std::to_string(k) +
                    " exceeds history size " + std::to_string(items.size()));
  }
  CandidateSet set{user, recommended, k, {}};
  // Odometer over index combinations, advancing the rightmost free slot.
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t n = items.size();
  while (true) {
    Explanation e{user, recommended, {}};
    e.items.reserve(k);
    for (std::size_t j : idx) e.items.push_back(items[j]);
    set.candidates.push_back(std::move(e));
    std::size_t slot = k;
    while (slot > 0 && idx[slot - 1] == n - k + slot - 1) --slot;
    if (slot == 0) break;
    ++idx[slot - 1];
    for (std::size_t j = slot; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return set;
}

SelectionTriple select_triple(std::span<const ScoredExplanation> scored,
                              ScoreKind kind) {
  if (scored.empty()) throw DataError("cannot select from no candidates");
  // Summed in sorted order so the mean does not depend on input order.
  std::vector<double> values;
  values.reserve(scored.size());
  for (const auto& s : scored) values.push_back(s.score);
  std::sort(values.begin(), values.end());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());

  // Prefer `b` over the current pick `a` when its key wins or ties with a
  // lexicographically smaller tuple.
  auto pick = [&](auto better) {
    const ScoredExplanation* best = &scored[0];
    for (const auto& s : scored.subspan(1)) {
      if (better(s, *best) ||
          (!better(*best, s) && s.explanation.items < best->explanation.items)) {
        best = &s;
      }
    }
    return best;
  };
  const auto* high = pick([](const auto& a, const auto& b) { return a.score > b.score; });
  const auto* low = pick([](const auto& a, const auto& b) { return a.score < b.score; });
  const auto* mid = pick([mean](const auto& a, const auto& b) {
    return std::abs(a.score - mean) < std::abs(b.score - mean);
  });
  return {kind,
          high->explanation,
          mid->explanation,
          low->explanation,
          {high->score, mid->score, low->score}};
}

Explanation select_baseline_items(UserId user, ItemId recommended,
                                  std::span<const ItemId> history,
                                  const std::map<ItemId, double>& per_item,
                                  std::size_t k, Level level) {
  if (k > history.size()) {
    throw DataError("explanation size exceeds history size");
  }
  std::vector<std::pair<ItemId, double>> rows;
  double mean = 0.0;
  for (ItemId item : history) {
    auto it = per_item.find(item);
    if (it == per_item.end()) {
      throw DataError("no baseline score for history item " +
                      std::to_string(raw(item)));
    }
    rows.emplace_back(item, it->second);
    mean += it->second;
  }
  mean /= static_cast<double>(rows.size());

  auto key = [&](double score) {
    switch (level) {
      case Level::kHigh: return -score;
      case Level::kLow: return score;
      case Level::kMean: return std::abs(score - mean);
    }
    return score;
  };
  std::sort(rows.begin(), rows.end(), [&](const auto& a, const auto& b) {
    const double ka = key(a.second), kb = key(b.second);
    if (ka != kb) return ka < kb;
    return a.first < b.first;
  });
  Explanation e{user, recommended, {}};
  for (std::size_t j = 0; j < k; ++j) e.items.push_back(rows[j].first);
  std::sort(e.items.begin(), e.items.end());
  return e;
}

}  // namespace cfprox
