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
#include <memory>
#include <string_view>
#include <vector>

#include "cfprox/dataset.hpp"
#include "cfprox/mf.hpp"

namespace cfprox {

// An item-based CF explanation: `items` (ascending, distinct) is the subset
// of the user's history offered as the reason for `recommended_item`.
struct Explanation {
  UserId user;
  ItemId recommended_item;
  std::vector<ItemId> items;

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

// Checks items ⊆ I_u^+ and recommended_item ∉ I_u^+. Throws ValidationError.
void validate_explanation(const InteractionDataset& dataset,
                          const Explanation& expl);

enum class CfStrategy { kFullRetrain, kWarmStartFinetune };

std::string_view to_string(CfStrategy strategy);
// Accepts "full-retrain" and "warm-start-finetune". Throws ConfigError.
CfStrategy parse_strategy(std::string_view text);

// Everything needed to read off the counterfactual ranking for one
// explanation. Candidate lists are ascending; the score vectors are aligned
// with cf_candidates.
struct CounterfactualContext {
  UserId user;
  ItemId recommended_item;
  std::vector<ItemId> base_candidates;  // I_u^-
  std::vector<ItemId> cf_candidates;    // I_u^- ∪ E
  std::shared_ptr<const FactorModel> cf_model;
  std::vector<double> raw_scores;
  std::vector<double> normalized_scores;

  // Normalized score of a member of cf_candidates. Throws DataError.
  double normalized(ItemId item) const;
};

struct CfResult {
  double score = 0.0;        // in [-1, 1]
  bool qualitative = false;  // true iff score > 0
  ItemId benchmark_item{};
  CfStrategy strategy = CfStrategy::kFullRetrain;
};

// θ^cf = train(S \ {u × E}) with the unchanged config and seed.
FactorModel cf_retrain(const InteractionDataset& dataset,
                       const TrainConfig& config, const Explanation& expl,
                       TrainTrace* trace = nullptr);

// Warm start: item factors and every other user's factor are copied from
// `base_model`; the target user's factor is re-solved against the item
// factors over the user's remaining rows, `iterations` times. A user with no
// remaining rows gets the zero vector.
FactorModel cf_finetune(const FactorModel& base_model,
                        const InteractionDataset& dataset,
                        const Explanation& expl, std::size_t iterations = 5);

// Builds I_u^-, I_u^{-cf} and the min-max normalized θ^cf scores over
// I_u^{-cf}. `dataset` is the training set that still contains u × E.
CounterfactualContext make_context(const InteractionDataset& dataset,
                                   std::shared_ptr<const FactorModel> cf_model,
                                   const Explanation& expl);

// Whether the argmax of θ^cf over I_u^{-cf} (ties to the lowest item id)
// differs from `item`.
bool cf_qualitative(const CounterfactualContext& context, ItemId item);

// Reads the proximity score off a context: normalized score of the benchmark
// item (best item other than the recommendation, ties to the lowest id)
// minus that of the recommendation. `qualitative` is strict displacement on
// the normalized scale, so it always equals score > 0; it agrees with
// cf_qualitative except under exact score ties.
CfResult evaluate_context(const CounterfactualContext& context,
                          CfStrategy strategy);

// Produces θ^cf for an explanation.
class CounterfactualProvider {
 public:
  virtual ~CounterfactualProvider() = default;
  virtual CfStrategy strategy() const = 0;
  // `trace` receives the training objective when the strategy trains.
  virtual FactorModel counterfactual_model(const InteractionDataset& dataset,
                                           const FactorModel& base_model,
                                           const Explanation& expl,
                                           TrainTrace* trace) const = 0;
};

class FullRetrainProvider final : public CounterfactualProvider {
 public:
  explicit FullRetrainProvider(TrainConfig config) : config_(config) {}
  CfStrategy strategy() const override { return CfStrategy::kFullRetrain; }
  FactorModel counterfactual_model(const InteractionDataset& dataset,
                                   const FactorModel& base_model,
                                   const Explanation& expl,
                                   TrainTrace* trace) const override;

 private:
  TrainConfig config_;
};

class WarmStartFinetuneProvider final : public CounterfactualProvider {
 public:
  explicit WarmStartFinetuneProvider(std::size_t iterations = 5)
      : iterations_(iterations) {}
  CfStrategy strategy() const override { return CfStrategy::kWarmStartFinetune; }
  FactorModel counterfactual_model(const InteractionDataset& dataset,
                                   const FactorModel& base_model,
                                   const Explanation& expl,
                                   TrainTrace* trace) const override;

 private:
  std::size_t iterations_;
};

std::unique_ptr<CounterfactualProvider> make_provider(
    CfStrategy strategy, const TrainConfig& config,
    std::size_t finetune_iterations = 5);

// The recommendation under `model`: argmax over I_u^-, ties to the lowest id.
ItemId recommend(const InteractionDataset& dataset, const FactorModel& model,
                 UserId user);

// Counterfactual proximity of `expl`. Verifies that expl.recommended_item is
// what `base_model` recommends, builds θ^cf with `provider` and scores it.
CfResult cf_score(const InteractionDataset& dataset,
                  const FactorModel& base_model, const Explanation& expl,
                  const CounterfactualProvider& provider,
                  TrainTrace* trace = nullptr,
                  CounterfactualContext* context_out = nullptr);

// Convenience overload building the provider from a strategy tag.
CfResult cf_score(const InteractionDataset& dataset, const TrainConfig& config,
                  const FactorModel& base_model, const Explanation& expl,
                  CfStrategy strategy, std::size_t finetune_iterations = 5);

}  // namespace cfprox
