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
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cfprox/als_kernels.hpp"
#include "cfprox/dataset.hpp"

namespace cfprox {

// Hyperparameters of the regularized squared-error MF objective
//   sum_(u,i) (r_ui - p_u . q_i)^2 + lambda (sum_u ||p_u||^2 + sum_i ||q_i||^2)
// and of its ALS solver. One iteration is a user half-sweep followed by an
// item half-sweep.
struct TrainConfig {
  std::size_t embedding_dim = 40;
  std::size_t iterations = 20;
  double regularization = 0.05;
  double init_scale = 0.1;
  std::uint64_t seed = 1;

  // Throws ConfigError.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Trained user and item factors. Rows follow the ascending id order of
// users() and items().
class FactorModel {
 public:
  FactorModel(std::vector<UserId> users, std::vector<ItemId> items,
              FactorMatrix user_factors, FactorMatrix item_factors,
              TrainConfig config);

  std::size_t dim() const { return static_cast<std::size_t>(user_factors_.cols()); }
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }
  const FactorMatrix& user_factors() const { return user_factors_; }
  const FactorMatrix& item_factors() const { return item_factors_; }
  const TrainConfig& config() const { return config_; }

  std::optional<std::size_t> user_index(UserId u) const;
  std::optional<std::size_t> item_index(ItemId i) const;

  // Throw DataError for unknown ids.
  Eigen::RowVectorXd user_factor(UserId u) const;
  Eigen::RowVectorXd item_factor(ItemId i) const;

  // Copy with one user's factor replaced.
  FactorModel with_user_factor(UserId u, const Eigen::RowVectorXd& factor) const;

  // p_u . q_i for dense row indices, summed in coordinate order so the
  // value never depends on vectorization or alignment.
  double affinity(std::size_t user_row, std::size_t item_row) const;

 private:
  std::size_t require_user(UserId u) const;
  std::size_t require_item(ItemId i) const;

  std::vector<UserId> users_;
  std::vector<ItemId> items_;
  std::unordered_map<UserId, std::size_t> user_pos_;
  std::unordered_map<ItemId, std::size_t> item_pos_;
  FactorMatrix user_factors_;
  FactorMatrix item_factors_;
  TrainConfig config_;
};

// Objective value at the start of training and after every half-sweep.
struct TrainTrace {
  std::vector<double> objective;
};

// Steps of `trace` where the objective rose by more than
// rel_slack * |previous value|. `worst` receives the largest relative rise
// observed (0 when the trace never rises).
std::size_t objective_increases(const TrainTrace& trace, double rel_slack = 1e-12,
                                double* worst = nullptr);

// The rating matrix of a dataset in both orientations, indexed densely by
// the dataset's ascending user and item order.
struct RatingMatrix {
  CompressedRows by_user;
  CompressedRows by_item;
};
RatingMatrix rating_matrix(const InteractionDataset& dataset);

// Seeded uniform(-init_scale, init_scale) initialisation (users first, then
// items, row-major) followed by `iterations` ALS sweeps. Deterministic in
// (dataset, config) regardless of thread count.
FactorModel train(const InteractionDataset& dataset, const TrainConfig& config,
                  TrainTrace* trace = nullptr);

// f(u, i) = p_u . q_i.
double predict(const FactorModel& model, UserId user, ItemId item);

// Candidates by descending score, ties by ascending item id.
std::vector<std::pair<ItemId, double>> rank(const FactorModel& model,
                                            UserId user,
                                            std::span<const ItemId> candidates);

// Min-max rescale to [0, 1]; a constant list maps to 0.5 everywhere.
std::vector<double> normalize_scores(std::span<const double> scores);

// Closed-form ridge solve of a user factor against the model's fixed item
// factors.
Eigen::RowVectorXd fold_in_user(
    const FactorModel& model,
    std::span<const std::pair<ItemId, double>> history, double lambda);

}  // namespace cfprox
