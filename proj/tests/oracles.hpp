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

// Reference implementations kept apart from the library code they check.

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cfprox/counterfactual.hpp"

namespace cfprox::testing {

struct OracleResult {
  double score;
  bool displaced;
  ItemId benchmark;
};

// Materializes the full counterfactual ranking list over every item the
// user may be recommended once E is forgotten, then reads the score off it.
inline OracleResult brute_force_cf(const InteractionDataset& ds, const FactorModel& cf,
                                   const Explanation& expl) {
  const std::size_t u = *cf.user_index(expl.user);
  std::vector<std::pair<double, ItemId>> list;
  for (std::size_t c = 0; c < cf.items().size(); ++c) {
    const ItemId item = cf.items()[c];
    const bool forgotten =
        std::find(expl.items.begin(), expl.items.end(), item) != expl.items.end();
    if (ds.has_interaction(expl.user, item) && !forgotten) continue;
    double s = 0.0;
    for (Eigen::Index k = 0; k < cf.user_factors().cols(); ++k) {
      s += cf.user_factors()(static_cast<Eigen::Index>(u), k) *
           cf.item_factors()(static_cast<Eigen::Index>(c), k);
    }
    list.emplace_back(s, item);
  }
  std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const double hi = list.front().first, lo = list.back().first;
  auto norm = [&](double s) { return hi > lo ? (s - lo) / (hi - lo) : 0.5; };
  double rec = 0.0;
  for (const auto& [s, item] : list)
    if (item == expl.recommended_item) rec = norm(s);
  for (const auto& [s, item] : list) {
    if (item != expl.recommended_item) {
      return {norm(s) - rec, list.front().second != expl.recommended_item, item};
    }
  }
  throw std::logic_error("single-item ranking list");
}

}  // namespace cfprox::testing
