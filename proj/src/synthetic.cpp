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

#include "cfprox/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace cfprox {
namespace {

constexpr std::array<const char*, 19> kGenres = {
    "Action",  "Adventure", "Animation", "Children",    "Comedy",
    "Crime",   "Documentary", "Drama",   "Fantasy",     "Film-Noir",
    "Horror",  "IMAX",      "Musical",   "Mystery",     "Romance",
    "Sci-Fi",  "Thriller",  "War",       "Western"};

}  // namespace

InteractionDataset make_synthetic(const SyntheticSpec& spec) {
  if (spec.users == 0 || spec.items == 0) {
    throw ConfigError("synthetic dataset needs users and items");
  }
  if (spec.min_per_user > spec.items ||
      spec.min_per_user * spec.users > spec.ratings ||
      spec.ratings > spec.users * spec.items) {
    throw ConfigError("synthetic rating count is infeasible for its shape");
  }
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t k = std::max<std::size_t>(spec.latent_dim, 1);
  const double latent_sd = 0.9 / std::sqrt(static_cast<double>(k));

  // Popularity: Zipf weights over a random permutation of item slots.
  std::vector<std::size_t> order(spec.items);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<double> weight(spec.items);
  for (std::size_t r = 0; r < spec.items; ++r) {
    weight[order[r]] =
        1.0 / std::pow(static_cast<double>(r + 1), spec.popularity_exponent);
  }

  std::vector<std::vector<double>> item_vec(spec.items, std::vector<double>(k));
  std::vector<double> item_bias(spec.items);
  GenreMap genres;
  TitleMap titles;
  std::vector<ItemId> items(spec.items);
  for (std::size_t j = 0; j < spec.items; ++j) {
    for (auto& x : item_vec[j]) x = latent_sd * normal(rng);
    item_bias[j] = 0.35 * normal(rng) + 0.15 * std::log(weight[j] * 50.0 + 1.0);
    items[j] = ItemId{static_cast<std::int64_t>(j + 1)};
    titles[items[j]] = "Synthetic Movie " + std::to_string(j + 1);

    std::vector<std::string> tags;
    if (unit(rng) >= 0.02) {
      // Primary genre follows the dominant latent coordinate and its sign.
      std::size_t lead = 0;
      for (std::size_t c = 1; c < k; ++c) {
        if (std::abs(item_vec[j][c]) > std::abs(item_vec[j][lead])) lead = c;
      }
      const std::size_t primary =
          (2 * lead + (item_vec[j][lead] < 0 ? 1 : 0)) % kGenres.size();
      tags.emplace_back(kGenres[primary]);
      const int extra = static_cast<int>(unit(rng) * 3.0);
      for (int e = 0; e < extra; ++e) {
        tags.emplace_back(kGenres[static_cast<std::size_t>(
            unit(rng) * static_cast<double>(kGenres.size())) % kGenres.size()]);
      }
      std::sort(tags.begin(), tags.end());
      tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
    }
    genres[items[j]] = std::move(tags);
  }

  // Per-user activity: min_per_user plus a log-normal share of the rest.
  std::vector<double> share(spec.users);
  for (auto& s : share) s = std::exp(1.1 * normal(rng));
  const double share_sum = std::accumulate(share.begin(), share.end(), 0.0);
  const std::size_t spare = spec.ratings - spec.min_per_user * spec.users;
  std::vector<std::size_t> count(spec.users);
  std::size_t assigned = 0;
  for (std::size_t u = 0; u < spec.users; ++u) {
    const auto extra = static_cast<std::size_t>(
        std::floor(static_cast<double>(spare) * share[u] / share_sum));
    count[u] = std::min(spec.items, spec.min_per_user + extra);
    assigned += count[u];
  }
  for (std::size_t u = 0; assigned < spec.ratings; u = (u + 1) % spec.users) {
    if (count[u] < spec.items) {
      ++count[u];
      ++assigned;
    }
  }

  std::vector<Interaction> rows;
  rows.reserve(spec.ratings);
  std::vector<UserId> users(spec.users);
  std::vector<double> user_vec(k);
  std::vector<std::pair<double, std::size_t>> keys(spec.items);
  std::uniform_int_distribution<std::int64_t> when(964982703, 1537799250);
  for (std::size_t u = 0; u < spec.users; ++u) {
    users[u] = UserId{static_cast<std::int64_t>(u + 1)};
    for (auto& x : user_vec) x = latent_sd * normal(rng);
    const double user_bias = 0.4 * normal(rng);
    // Weighted sampling without replacement (exponential-key method).
    for (std::size_t j = 0; j < spec.items; ++j) {
      keys[j] = {std::log(unit(rng) + 1e-300) / weight[j], j};
    }
    std::partial_sort(keys.begin(), keys.begin() + count[u], keys.end(),
                      [](const auto& a, const auto& b) {
                        return a.first > b.first;
                      });
    for (std::size_t n = 0; n < count[u]; ++n) {
      const std::size_t j = keys[n].second;
      double affinity = 0.0;
      for (std::size_t c = 0; c < k; ++c) affinity += user_vec[c] * item_vec[j][c];
      double r = 3.5 + user_bias + item_bias[j] + 2.0 * affinity +
                 spec.noise_sd * normal(rng);
      r = std::clamp(std::round(r * 2.0) / 2.0, 0.5, 5.0);
      rows.push_back({users[u], items[j], r, when(rng)});
    }
  }
  return InteractionDataset(std::move(users), std::move(items), std::move(rows),
                            std::move(genres), RatingScale{}, std::move(titles));
}

}  // namespace cfprox
