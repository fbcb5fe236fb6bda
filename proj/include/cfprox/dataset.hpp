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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cfprox/types.hpp"

namespace cfprox {

struct Interaction {
  UserId user;
  ItemId item;
  double rating;
  std::int64_t timestamp;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

struct RatingScale {
  double min = 0.5;
  double max = 5.0;
};

// Item id -> sorted, de-duplicated genre tags. "(no genres listed)" maps to
// an empty list.
using GenreMap = std::map<ItemId, std::vector<std::string>>;
using TitleMap = std::map<ItemId, std::string>;

// Users, items and the explicit-feedback interaction history S.
//
// Immutable after construction. Interactions are kept sorted by
// (user, item), so a user's history is one contiguous run. Genre and title
// tables are shared between copies.
class InteractionDataset {
 public:
  InteractionDataset() = default;

  // Validates every invariant: ids unique, interactions reference known
  // users/items, at most one interaction per pair, ratings within `scale`.
  // Throws ValidationError.
  InteractionDataset(std::vector<UserId> users, std::vector<ItemId> items,
                     std::vector<Interaction> interactions, GenreMap genres,
                     RatingScale scale = {}, TitleMap titles = {});

  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }
  const std::vector<Interaction>& interactions() const { return interactions_; }
  const GenreMap& genres() const { return *genres_; }
  const TitleMap& titles() const { return *titles_; }
  RatingScale scale() const { return scale_; }

  bool has_user(UserId u) const;
  bool has_item(ItemId i) const;
  bool has_interaction(UserId u, ItemId i) const;

  // The user's rows, ordered by item id. Empty for unknown users.
  std::span<const Interaction> interactions_of(UserId u) const;

  // I_u^+, ascending.
  std::vector<ItemId> items_of(UserId u) const;

  // I_u^- = I \ I_u^+, ascending.
  std::vector<ItemId> items_not_of(UserId u) const;

  // Interaction count per item, aligned with items().
  std::vector<std::size_t> item_counts() const;

  // Builds a dataset sharing this one's genre and title tables.
  InteractionDataset with_interactions(std::vector<UserId> users,
                                       std::vector<Interaction> rows) const;

 private:
  std::vector<UserId> users_;
  std::vector<ItemId> items_;
  std::vector<Interaction> interactions_;
  std::shared_ptr<const GenreMap> genres_ = std::make_shared<GenreMap>();
  std::shared_ptr<const TitleMap> titles_ = std::make_shared<TitleMap>();
  RatingScale scale_;
};

// Parses MovieLens `ratings.csv` (userId,movieId,rating,timestamp) and
// `movies.csv` (movieId,title,genres). Duplicate (user, item) rows keep the
// latest timestamp. Movies without ratings are kept as zero-interaction items.
InteractionDataset load_movielens(const std::filesystem::path& ratings_path,
                                  const std::filesystem::path& movies_path,
                                  RatingScale scale = {});

// Writes the two files back in MovieLens layout.
void write_movielens(const InteractionDataset& dataset,
                     const std::filesystem::path& ratings_path,
                     const std::filesystem::path& movies_path);

// Nearest-rank q-quantile of the per-item interaction counts, zero-count
// items included.
std::size_t popularity_threshold(const InteractionDataset& dataset,
                                 double quantile);

// Items whose interaction count reaches popularity_threshold(quantile).
std::vector<ItemId> popular_items(const InteractionDataset& dataset,
                                  double quantile);

struct SyntheticHistory {
  UserId user;
  std::vector<ItemId> history;
  double imputed_rating;
  std::uint64_t seed;
};

// Uniform sample of `h` distinct popular items for a freshly allocated user
// id (one past the largest existing id).
SyntheticHistory sample_history(const InteractionDataset& dataset,
                                std::size_t h, double quantile,
                                double imputed_rating, std::uint64_t seed);

// Adds one (hist.user, item, imputed_rating, timestamp 0) row per history
// item.
InteractionDataset materialize(const InteractionDataset& dataset,
                               const SyntheticHistory& hist);

// S \ {user x items}. The user stays in users() even if left with no rows.
InteractionDataset remove_interactions(const InteractionDataset& dataset,
                                       UserId user,
                                       std::span<const ItemId> items);

}  // namespace cfprox
