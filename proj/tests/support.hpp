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

// Small builders and seeded generators shared by the tests.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cfprox/dataset.hpp"
#include "cfprox/mf.hpp"

namespace cfprox::testing {

inline UserId U(std::int64_t v) { return UserId{v}; }
inline ItemId I(std::int64_t v) { return ItemId{v}; }

struct Row {
  std::int64_t user;
  std::int64_t item;
  double rating;
};

// Users 1..n_users, items 1..n_items.
inline InteractionDataset toy(std::int64_t n_users, std::int64_t n_items,
                              const std::vector<Row>& rows, GenreMap genres = {}) {
  std::vector<UserId> users;
  std::vector<ItemId> items;
  for (std::int64_t u = 1; u <= n_users; ++u) users.push_back(U(u));
  for (std::int64_t i = 1; i <= n_items; ++i) items.push_back(I(i));
  std::vector<Interaction> out;
  for (const auto& r : rows) out.push_back({U(r.user), I(r.item), r.rating, 0});
  return InteractionDataset(users, items, out, std::move(genres));
}

inline const std::vector<std::string>& genre_vocabulary() {
  static const std::vector<std::string> v = {"Action", "Comedy", "Drama",
                                             "Horror", "Romance", "Sci-Fi"};
  return v;
}

// Random explicit-feedback dataset: every user rates between min_per_user
// and max_per_user distinct items on the half-star scale, and every item
// carries 0..3 genres.
inline InteractionDataset random_dataset(std::mt19937_64& rng, std::int64_t n_users,
                                         std::int64_t n_items,
                                         std::size_t min_per_user,
                                         std::size_t max_per_user) {
  std::vector<std::int64_t> ids(static_cast<std::size_t>(n_items));
  for (std::int64_t i = 0; i < n_items; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
  std::uniform_int_distribution<std::size_t> count(min_per_user, max_per_user);
  std::uniform_int_distribution<int> stars(1, 10);
  std::vector<Row> rows;
  for (std::int64_t u = 1; u <= n_users; ++u) {
    std::shuffle(ids.begin(), ids.end(), rng);
    const std::size_t c = std::min(count(rng), ids.size());
    for (std::size_t k = 0; k < c; ++k) rows.push_back({u, ids[k], 0.5 * stars(rng)});
  }
  GenreMap genres;
  std::uniform_int_distribution<std::size_t> ng(0, 3), pick(0, genre_vocabulary().size() - 1);
  for (std::int64_t i = 1; i <= n_items; ++i) {
    std::vector<std::string> g;
    for (std::size_t k = ng(rng); k > 0; --k) g.push_back(genre_vocabulary()[pick(rng)]);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    genres[I(i)] = g;
  }
  return toy(n_users, n_items, rows, std::move(genres));
}

inline TrainConfig small_config(std::size_t d = 4, std::size_t iterations = 10,
                                std::uint64_t seed = 3) {
  TrainConfig c;
  c.embedding_dim = d;
  c.iterations = iterations;
  c.seed = seed;
  return c;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("cfprox-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

}  // namespace cfprox::testing
