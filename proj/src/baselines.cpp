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

#include "cfprox/baselines.hpp"

#include <algorithm>
#include <stdexcept>

namespace cfprox {

double item_cosine(const FactorModel& model, ItemId a, ItemId b) {
  const Eigen::RowVectorXd qa = model.item_factor(a);
  const Eigen::RowVectorXd qb = model.item_factor(b);
  const double na = qa.norm(), nb = qb.norm();
  if (na == 0.0) throw DataError("item " + std::to_string(raw(a)) + " has a zero factor");
  if (nb == 0.0) throw DataError("item " + std::to_string(raw(b)) + " has a zero factor");
  return std::clamp(qa.dot(qb) / (na * nb), -1.0, 1.0);
}

double genre_jaccard(const GenreMap& genres, ItemId a, ItemId b) {
  auto ga = genres.find(a);
  auto gb = genres.find(b);
  if (ga == genres.end()) throw DataError("no genres for item " + std::to_string(raw(a)));
  if (gb == genres.end()) throw DataError("no genres for item " + std::to_string(raw(b)));
  const auto& x = ga->second;
  const auto& y = gb->second;
  std::vector<std::string> common;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(),
                        std::back_inserter(common));
  const std::size_t uni = x.size() + y.size() - common.size();
  if (uni == 0) return 0.0;
  return static_cast<double>(common.size()) / static_cast<double>(uni);
}

double item_sim(const FactorModel& model, const Explanation& expl) {
  if (expl.items.empty()) throw DataError("Item-Sim of an empty explanation");
  double sum = 0.0;
  for (ItemId e : expl.items) sum += item_cosine(model, e, expl.recommended_item);
  const double value = sum / static_cast<double>(expl.items.size());
  if (!(value >= -1.0 && value <= 1.0)) {
    throw std::logic_error("Item-Sim escaped [-1, 1]");
  }
  return value;
}

double genre_jacc(const GenreMap& genres, const Explanation& expl) {
  if (expl.items.empty()) throw DataError("Genre-Jacc of an empty explanation");
  double sum = 0.0;
  for (ItemId e : expl.items) sum += genre_jaccard(genres, e, expl.recommended_item);
  const double value = sum / static_cast<double>(expl.items.size());
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::logic_error("Genre-Jacc escaped [0, 1]");
  }
  return value;
}

}  // namespace cfprox
