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

#include "cfprox/mf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace cfprox {

void TrainConfig::validate() const {
  if (embedding_dim < 1) throw ConfigError("embedding_dim must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (!(regularization > 0.0) || !std::isfinite(regularization)) {
    throw ConfigError("regularization must be a positive finite number");
  }
  if (!(init_scale > 0.0) || !std::isfinite(init_scale)) {
    throw ConfigError("init_scale must be a positive finite number");
  }
}

FactorModel::FactorModel(std::vector<UserId> users, std::vector<ItemId> items,
                         FactorMatrix user_factors, FactorMatrix item_factors,
                         TrainConfig config)
    : users_(std::move(users)),
      items_(std::move(items)),
      user_factors_(std::move(user_factors)),
      item_factors_(std::move(item_factors)),
      config_(config) {
  if (static_cast<std::size_t>(user_factors_.rows()) != users_.size() ||
      static_cast<std::size_t>(item_factors_.rows()) != items_.size() ||
      user_factors_.cols() != item_factors_.cols()) {
    throw ValidationError("factor matrix shape does not match the id lists");
  }
  if (!user_factors_.allFinite() || !item_factors_.allFinite()) {
    throw NumericalError("factor model holds non-finite entries");
  }
  for (std::size_t k = 0; k < users_.size(); ++k) {
    if (!user_pos_.emplace(users_[k], k).second) {
      throw ValidationError("duplicate user id in factor model");
    }
  }
  for (std::size_t k = 0; k < items_.size(); ++k) {
    if (!item_pos_.emplace(items_[k], k).second) {
      throw ValidationError("duplicate item id in factor model");
    }
  }
}

std::optional<std::size_t> FactorModel::user_index(UserId u) const {
  auto it = user_pos_.find(u);
  if (it == user_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> FactorModel::item_index(ItemId i) const {
  auto it = item_pos_.find(i);
  if (it == item_pos_.end()) return std::nullopt;
  return it->second;
}

std::size_t FactorModel::require_user(UserId u) const {
  auto k = user_index(u);
  if (!k) throw DataError("model has no factor for user " + std::to_string(raw(u)));
  return *k;
}

std::size_t FactorModel::require_item(ItemId i) const {
  auto k = item_index(i);
  if (!k) throw DataError("model has no factor for item " + std::to_string(raw(i)));
  return *k;
}

Eigen::RowVectorXd FactorModel::user_factor(UserId u) const {
  return user_factors_.row(static_cast<Eigen::Index>(require_user(u)));
}

Eigen::RowVectorXd FactorModel::item_factor(ItemId i) const {
  return item_factors_.row(static_cast<Eigen::Index>(require_item(i)));
}

FactorModel FactorModel::with_user_factor(
    UserId u, const Eigen::RowVectorXd& factor) const {
  if (factor.size() != user_factors_.cols()) {
    throw ValidationError("user factor has the wrong dimension");
  }
  FactorModel copy = *this;
  copy.user_factors_.row(static_cast<Eigen::Index>(require_user(u))) = factor;
  return copy;
}

double FactorModel::affinity(std::size_t user_row, std::size_t item_row) const {
  const double* p = user_factors_.data() + user_row * dim();
  const double* q = item_factors_.data() + item_row * dim();
  double sum = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) sum += p[k] * q[k];
  return sum;
}

RatingMatrix rating_matrix(const InteractionDataset& dataset) {
  const auto& users = dataset.users();
  const auto& items = dataset.items();
  RatingMatrix m;
  m.by_user.offsets.assign(users.size() + 1, 0);
  m.by_user.columns.reserve(dataset.interactions().size());
  m.by_user.values.reserve(dataset.interactions().size());
  // Interactions are sorted by (user, item), so rows come out in order.
  std::size_t u = 0;
  for (const auto& row : dataset.interactions()) {
    while (users[u] != row.user) m.by_user.offsets[++u] = m.by_user.nnz();
    const auto col = std::lower_bound(items.begin(), items.end(), row.item) -
                     items.begin();
    m.by_user.columns.push_back(static_cast<std::uint32_t>(col));
    m.by_user.values.push_back(row.rating);
  }
  while (u < users.size()) m.by_user.offsets[++u] = m.by_user.nnz();
  m.by_item = transpose(m.by_user, items.size());
  return m;
}

FactorModel train(const InteractionDataset& dataset, const TrainConfig& config,
                  TrainTrace* trace) {
  config.validate();
  if (dataset.interactions().empty()) {
    throw DataError("cannot train on a dataset without interactions");
  }
  const RatingMatrix ratings = rating_matrix(dataset);
  const auto d = static_cast<Eigen::Index>(config.embedding_dim);
  FactorMatrix p(static_cast<Eigen::Index>(dataset.users().size()), d);
  FactorMatrix q(static_cast<Eigen::Index>(dataset.items().size()), d);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-config.init_scale,
                                              config.init_scale);
  for (Eigen::Index k = 0; k < p.size(); ++k) p.data()[k] = init(rng);
  for (Eigen::Index k = 0; k < q.size(); ++k) q.data()[k] = init(rng);

  const double lambda = config.regularization;
  auto record = [&](std::size_t iteration) {
    const double value = als_objective_parallel(ratings.by_user, p, q, lambda);
    if (!std::isfinite(value)) {
      throw NumericalError("non-finite objective at iteration " +
                           std::to_string(iteration));
    }
    if (trace) trace->objective.push_back(value);
  };

  if (trace) trace->objective.clear();
  record(0);
  for (std::size_t it = 1; it <= config.iterations; ++it) {
    try {
      half_sweep_parallel(ratings.by_user, q, lambda, p);
      record(it);
      half_sweep_parallel(ratings.by_item, p, lambda, q);
      record(it);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (iteration " +
                           std::to_string(it) + ")");
    }
  }
  return FactorModel(dataset.users(), dataset.items(), std::move(p),
                     std::move(q), config);
}

std::size_t objective_increases(const TrainTrace& trace, double rel_slack,
                                double* worst) {
  std::size_t violations = 0;
  double largest = 0.0;
  for (std::size_t k = 1; k < trace.objective.size(); ++k) {
    const double prev = trace.objective[k - 1];
    const double rise = (trace.objective[k] - prev) / std::max(std::abs(prev), 1e-300);
    largest = std::max(largest, rise);
    if (rise > rel_slack) ++violations;
  }
  if (worst) *worst = largest;
  return violations;
}

double predict(const FactorModel& model, UserId user, ItemId item) {
  const auto u = model.user_index(user);
  const auto i = model.item_index(item);
  if (!u) throw DataError("unknown user " + std::to_string(raw(user)));
  if (!i) throw DataError("unknown item " + std::to_string(raw(item)));
  return model.affinity(*u, *i);
}

std::vector<std::pair<ItemId, double>> rank(const FactorModel& model,
                                            UserId user,
                                            std::span<const ItemId> candidates) {
  if (candidates.empty()) throw DataError("cannot rank an empty candidate set");
  std::vector<std::pair<ItemId, double>> out;
  out.reserve(candidates.size());
  for (ItemId item : candidates) {
    out.emplace_back(item, predict(model, user, item));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::vector<double> normalize_scores(std::span<const double> scores) {
  if (scores.empty()) throw DataError("cannot normalize an empty score list");
  for (double s : scores) {
    if (!std::isfinite(s)) throw NumericalError("non-finite score");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  const double min = *lo, span = *hi - *lo;
  std::vector<double> out(scores.size(), 0.5);
  if (span > 0.0) {
    for (std::size_t k = 0; k < scores.size(); ++k) {
      out[k] = std::clamp((scores[k] - min) / span, 0.0, 1.0);
    }
  }
  return out;
}

Eigen::RowVectorXd fold_in_user(
    const FactorModel& model,
    std::span<const std::pair<ItemId, double>> history, double lambda) {
  if (history.empty()) throw DataError("fold-in needs a non-empty history");
  if (!(lambda >= 0.0)) throw ConfigError("fold-in lambda must be >= 0");
  std::vector<std::pair<std::uint32_t, double>> entries;
  entries.reserve(history.size());
  for (const auto& [item, rating] : history) {
    auto k = model.item_index(item);
    if (!k) throw DataError("fold-in item " + std::to_string(raw(item)) + " unknown");
    entries.emplace_back(static_cast<std::uint32_t>(*k), rating);
  }
  std::sort(entries.begin(), entries.end());
  CompressedRows row;
  for (const auto& [col, rating] : entries) {
    row.columns.push_back(col);
    row.values.push_back(rating);
  }
  row.offsets.push_back(row.values.size());

  Eigen::RowVectorXd out(static_cast<Eigen::Index>(model.dim()));
  if (!solve_ridge_row(row, 0, model.item_factors(), lambda, out)) {
    throw NumericalError("fold-in normal equations are singular");
  }
  if (!out.allFinite()) throw NumericalError("fold-in produced non-finite values");
  return out;
}

}  // namespace cfprox
