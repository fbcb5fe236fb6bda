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

#include "cfprox/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"

namespace cfprox {
namespace {

bool by_user_item(const Interaction& a, const Interaction& b) {
  if (a.user != b.user) return a.user < b.user;
  return a.item < b.item;
}

std::string pair_name(UserId u, ItemId i) {
  std::ostringstream os;
  os << "(user " << u << ", item " << i << ")";
  return os.str();
}

std::vector<std::string> split_genres(const std::string& field) {
  std::vector<std::string> genres;
  if (field == "(no genres listed)" || field.empty()) return genres;
  std::string token;
  std::istringstream in(field);
  while (std::getline(in, token, '|')) {
    if (!token.empty()) genres.push_back(token);
  }
  std::sort(genres.begin(), genres.end());
  genres.erase(std::unique(genres.begin(), genres.end()), genres.end());
  return genres;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

void expect_header(std::ifstream& in, const std::filesystem::path& path,
                   const std::string& header) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(path.string(), 1, 1, "missing header `" + header + "`");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (line != header) {
    throw ParseError(path.string(), 1, 1,
                     "expected header `" + header + "`, got `" + line + "`");
  }
}

}  // namespace

InteractionDataset::InteractionDataset(std::vector<UserId> users,
                                       std::vector<ItemId> items,
                                       std::vector<Interaction> interactions,
                                       GenreMap genres, RatingScale scale,
                                       TitleMap titles)
    : users_(std::move(users)),
      items_(std::move(items)),
      interactions_(std::move(interactions)),
      genres_(std::make_shared<const GenreMap>(std::move(genres))),
      titles_(std::make_shared<const TitleMap>(std::move(titles))),
      scale_(scale) {
  std::sort(users_.begin(), users_.end());
  std::sort(items_.begin(), items_.end());
  if (std::adjacent_find(users_.begin(), users_.end()) != users_.end()) {
    throw ValidationError("duplicate user id");
  }
  if (std::adjacent_find(items_.begin(), items_.end()) != items_.end()) {
    throw ValidationError("duplicate item id");
  }
  std::sort(interactions_.begin(), interactions_.end(), by_user_item);
  for (std::size_t k = 0; k < interactions_.size(); ++k) {
    const Interaction& row = interactions_[k];
    if (!has_user(row.user)) {
      throw ValidationError("interaction references unknown user " +
                            std::to_string(raw(row.user)));
    }
    if (!has_item(row.item)) {
      throw ValidationError("interaction references unknown item " +
                            std::to_string(raw(row.item)));
    }
    if (!(row.rating >= scale_.min && row.rating <= scale_.max)) {
      std::ostringstream os;
      os << "rating " << row.rating << " for " << pair_name(row.user, row.item)
         << " outside [" << scale_.min << ", " << scale_.max << "]";
      throw ValidationError(os.str());
    }
    if (k > 0 && interactions_[k - 1].user == row.user &&
        interactions_[k - 1].item == row.item) {
      throw ValidationError("duplicate interaction " +
                            pair_name(row.user, row.item));
    }
  }
}

bool InteractionDataset::has_user(UserId u) const {
  return std::binary_search(users_.begin(), users_.end(), u);
}

bool InteractionDataset::has_item(ItemId i) const {
  return std::binary_search(items_.begin(), items_.end(), i);
}

std::span<const Interaction> InteractionDataset::interactions_of(
    UserId u) const {
  auto lo = std::lower_bound(
      interactions_.begin(), interactions_.end(), u,
      [](const Interaction& row, UserId key) { return row.user < key; });
  auto hi = std::upper_bound(
      lo, interactions_.end(), u,
      [](UserId key, const Interaction& row) { return key < row.user; });
  return {lo, hi};
}

bool InteractionDataset::has_interaction(UserId u, ItemId i) const {
  auto rows = interactions_of(u);
  return std::binary_search(
      rows.begin(), rows.end(), Interaction{u, i, 0.0, 0}, by_user_item);
}

std::vector<ItemId> InteractionDataset::items_of(UserId u) const {
  std::vector<ItemId> out;
  for (const auto& row : interactions_of(u)) out.push_back(row.item);
  return out;
}

std::vector<ItemId> InteractionDataset::items_not_of(UserId u) const {
  const auto mine = items_of(u);
  std::vector<ItemId> out;
  out.reserve(items_.size() - mine.size());
  std::set_difference(items_.begin(), items_.end(), mine.begin(), mine.end(),
                      std::back_inserter(out));
  return out;
}

std::vector<std::size_t> InteractionDataset::item_counts() const {
  std::vector<std::size_t> counts(items_.size(), 0);
  for (const auto& row : interactions_) {
    auto it = std::lower_bound(items_.begin(), items_.end(), row.item);
    ++counts[static_cast<std::size_t>(it - items_.begin())];
  }
  return counts;
}

InteractionDataset InteractionDataset::with_interactions(
    std::vector<UserId> users, std::vector<Interaction> rows) const {
  InteractionDataset out(std::move(users), items_, std::move(rows), {}, scale_);
  out.genres_ = genres_;
  out.titles_ = titles_;
  return out;
}

InteractionDataset load_movielens(const std::filesystem::path& ratings_path,
                                  const std::filesystem::path& movies_path,
                                  RatingScale scale) {
  std::vector<std::string> fields;
  std::size_t bad_column = 0;
  std::string line;

  GenreMap genres;
  TitleMap titles;
  std::set<ItemId> items;
  {
    auto in = open_or_throw(movies_path);
    expect_header(in, movies_path, "movieId,title,genres");
    const std::string file = movies_path.string();
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
      if (line.empty() || line == "\r") continue;
      if (!csv::split_record(line, fields, bad_column)) {
        throw ParseError(file, line_no, bad_column, "unterminated quote");
      }
      if (fields.size() != 3) {
        throw ParseError(file, line_no, std::min<std::size_t>(fields.size(), 4),
                         "expected 3 columns, got " +
                             std::to_string(fields.size()));
      }
      std::int64_t id = 0;
      if (!csv::parse_int(fields[0], id)) {
        throw ParseError(file, line_no, 1, "bad movieId `" + fields[0] + "`");
      }
      const ItemId item{id};
      if (!items.insert(item).second) {
        throw ParseError(file, line_no, 1,
                         "duplicate movieId " + std::to_string(id));
      }
      titles[item] = fields[1];
      genres[item] = split_genres(fields[2]);
    }
  }

  // (user, item) -> row index into `rows`; later timestamps win.
  std::vector<Interaction> rows;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  std::set<UserId> users;
  {
    auto in = open_or_throw(ratings_path);
    expect_header(in, ratings_path, "userId,movieId,rating,timestamp");
    const std::string file = ratings_path.string();
    for (std::size_t line_no = 2; std::getline(in, line); ++line_no) {
      if (line.empty() || line == "\r") continue;
      if (!csv::split_record(line, fields, bad_column)) {
        throw ParseError(file, line_no, bad_column, "unterminated quote");
      }
      if (fields.size() != 4) {
        throw ParseError(file, line_no, std::min<std::size_t>(fields.size(), 5),
                         "expected 4 columns, got " +
                             std::to_string(fields.size()));
      }
      std::int64_t user = 0, item = 0, ts = 0;
      double rating = 0.0;
      if (!csv::parse_int(fields[0], user)) {
        throw ParseError(file, line_no, 1, "bad userId `" + fields[0] + "`");
      }
      if (!csv::parse_int(fields[1], item)) {
        throw ParseError(file, line_no, 2, "bad movieId `" + fields[1] + "`");
      }
      if (!csv::parse_double(fields[2], rating)) {
        throw ParseError(file, line_no, 3, "bad rating `" + fields[2] + "`");
      }
      if (!csv::parse_int(fields[3], ts)) {
        throw ParseError(file, line_no, 4, "bad timestamp `" + fields[3] + "`");
      }
      if (!(rating >= scale.min && rating <= scale.max)) {
        std::ostringstream os;
        os << file << ":" << line_no << ": rating " << rating << " outside ["
           << scale.min << ", " << scale.max << "]";
        throw ValidationError(os.str());
      }
      users.insert(UserId{user});
      items.insert(ItemId{item});
      Interaction row{UserId{user}, ItemId{item}, rating, ts};
      auto [it, fresh] = seen.try_emplace({user, item}, rows.size());
      if (fresh) {
        rows.push_back(row);
      } else if (ts >= rows[it->second].timestamp) {
        rows[it->second] = row;
      }
    }
  }

  return InteractionDataset({users.begin(), users.end()},
                            {items.begin(), items.end()}, std::move(rows),
                            std::move(genres), scale, std::move(titles));
}

void write_movielens(const InteractionDataset& dataset,
                     const std::filesystem::path& ratings_path,
                     const std::filesystem::path& movies_path) {
  std::ofstream ratings(ratings_path, std::ios::binary);
  if (!ratings) throw DataError("cannot write " + ratings_path.string());
  ratings << "userId,movieId,rating,timestamp\n";
  for (const auto& row : dataset.interactions()) {
    ratings << raw(row.user) << ',' << raw(row.item) << ','
            << std::setprecision(17) << row.rating << ',' << row.timestamp
            << '\n';
  }

  std::ofstream movies(movies_path, std::ios::binary);
  if (!movies) throw DataError("cannot write " + movies_path.string());
  movies << "movieId,title,genres\n";
  for (ItemId item : dataset.items()) {
    auto t = dataset.titles().find(item);
    auto g = dataset.genres().find(item);
    std::string genre_field;
    if (g == dataset.genres().end() || g->second.empty()) {
      genre_field = "(no genres listed)";
    } else {
      for (std::size_t k = 0; k < g->second.size(); ++k) {
        if (k) genre_field += '|';
        genre_field += g->second[k];
      }
    }
    movies << raw(item) << ','
           << csv::escape(t == dataset.titles().end() ? "" : t->second) << ','
           << csv::escape(genre_field) << '\n';
  }
}

std::size_t popularity_threshold(const InteractionDataset& dataset,
                                 double quantile) {
  if (dataset.interactions().empty()) {
    throw DataError("popularity threshold of an empty dataset");
  }
  if (!(quantile >= 0.0 && quantile <= 1.0)) {
    throw ConfigError("quantile must lie in [0, 1]");
  }
  auto counts = dataset.item_counts();
  std::sort(counts.begin(), counts.end());
  const double n = static_cast<double>(counts.size());
  // Nearest rank: smallest rank r with r / n >= q. The epsilon absorbs
  // representation error in q * n (0.9 * 10 must give rank 9).
  auto rank = static_cast<std::size_t>(std::ceil(quantile * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, counts.size());
  return counts[rank - 1];
}

std::vector<ItemId> popular_items(const InteractionDataset& dataset,
                                  double quantile) {
  const std::size_t threshold = popularity_threshold(dataset, quantile);
  const auto counts = dataset.item_counts();
  std::vector<ItemId> out;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] >= threshold) out.push_back(dataset.items()[k]);
  }
  return out;
}

SyntheticHistory sample_history(const InteractionDataset& dataset,
                                std::size_t h, double quantile,
                                double imputed_rating, std::uint64_t seed) {
  const auto pool = popular_items(dataset, quantile);
  if (pool.size() < h) {
    throw DataError("need " + std::to_string(h) +
                    " popular items for a history, only " +
                    std::to_string(pool.size()) + " available");
  }
  std::vector<ItemId> picked;
  picked.reserve(h);
  std::mt19937_64 rng(seed);
  std::sample(pool.begin(), pool.end(), std::back_inserter(picked), h, rng);

  const UserId fresh = dataset.users().empty()
                           ? UserId{1}
                           : UserId{raw(dataset.users().back()) + 1};
  return {fresh, std::move(picked), imputed_rating, seed};
}

InteractionDataset materialize(const InteractionDataset& dataset,
                               const SyntheticHistory& hist) {
  if (dataset.has_user(hist.user)) {
    throw ValidationError("synthetic user id " +
                          std::to_string(raw(hist.user)) +
                          " collides with an existing user");
  }
  std::vector<Interaction> rows = dataset.interactions();
  for (ItemId item : hist.history) {
    if (!dataset.has_item(item)) {
      throw ValidationError("history item " + std::to_string(raw(item)) +
                            " is not in the dataset");
    }
    rows.push_back({hist.user, item, hist.imputed_rating, 0});
  }
  std::vector<UserId> users = dataset.users();
  users.push_back(hist.user);
  return dataset.with_interactions(std::move(users), std::move(rows));
}

InteractionDataset remove_interactions(const InteractionDataset& dataset,
                                       UserId user,
                                       std::span<const ItemId> items) {
  std::set<ItemId> doomed(items.begin(), items.end());
  for (ItemId item : doomed) {
    if (!dataset.has_interaction(user, item)) {
      throw ValidationError("cannot remove missing interaction " +
                            pair_name(user, item));
    }
  }
  std::vector<Interaction> rows;
  rows.reserve(dataset.interactions().size() - doomed.size());
  for (const auto& row : dataset.interactions()) {
    if (row.user == user && doomed.count(row.item)) continue;
    rows.push_back(row);
  }
  return dataset.with_interactions(dataset.users(), std::move(rows));
}

}  // namespace cfprox
