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

#include "cfprox/counterfactual.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace cfprox {
namespace {

std::vector<double> scores_for(const FactorModel& model, UserId user,
                               std::span<const ItemId> items) {
  const auto u = model.user_index(user);
  if (!u) throw DataError("model has no factor for user " + std::to_string(raw(user)));
  std::vector<double> out;
  out.reserve(items.size());
  for (ItemId item : items) {
    auto k = model.item_index(item);
    if (!k) throw DataError("model has no factor for item " + std::to_string(raw(item)));
    out.push_back(model.affinity(*u, *k));
  }
  return out;
}

// Index of the best entry, skipping `skip`; ties go to the earlier (lower
// id) entry because candidate lists are ascending.
std::size_t best_index(std::span<const double> scores,
                       std::size_t skip = static_cast<std::size_t>(-1)) {
  std::size_t best = static_cast<std::size_t>(-1);
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (k == skip) continue;
    if (best == static_cast<std::size_t>(-1) || scores[k] > scores[best]) best = k;
  }
  return best;
}

std::size_t position(std::span<const ItemId> sorted, ItemId item) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), item);
  if (it == sorted.end() || *it != item) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - sorted.begin());
}

}  // namespace

void validate_explanation(const InteractionDataset& dataset,
                          const Explanation& expl) {
  if (!dataset.has_user(expl.user)) {
    throw ValidationError("explanation user " + std::to_string(raw(expl.user)) +
                          " not in dataset");
  }
  if (!std::is_sorted(expl.items.begin(), expl.items.end()) ||
      std::adjacent_find(expl.items.begin(), expl.items.end()) !=
          expl.items.end()) {
    throw ValidationError("explanation items must be ascending and distinct");
  }
  for (ItemId item : expl.items) {
    if (!dataset.has_interaction(expl.user, item)) {
      throw ValidationError("explaining item " + std::to_string(raw(item)) +
                            " is not in the user's history");
    }
  }
  if (dataset.has_interaction(expl.user, expl.recommended_item)) {
    throw ValidationError("recommended item " +
                          std::to_string(raw(expl.recommended_item)) +
                          " is already in the user's history");
  }
}

std::string_view to_string(CfStrategy strategy) {
  switch (strategy) {
    case CfStrategy::kFullRetrain:
      return "full-retrain";
    case CfStrategy::kWarmStartFinetune:
      return "warm-start-finetune";
  }
  return "unknown";
}

CfStrategy parse_strategy(std::string_view text) {
  if (text == "full-retrain") return CfStrategy::kFullRetrain;
  if (text == "warm-start-finetune") return CfStrategy::kWarmStartFinetune;
  throw ConfigError("unknown strategy `" + std::string(text) +
                    "` (expected full-retrain or warm-start-finetune)");
}

double CounterfactualContext::normalized(ItemId item) const {
  const std::size_t k = position(cf_candidates, item);
  if (k == static_cast<std::size_t>(-1)) {
    throw DataError("item " + std::to_string(raw(item)) +
                    " is not a counterfactual candidate");
  }
  return normalized_scores[k];
}

FactorModel cf_retrain(const InteractionDataset& dataset,
                       const TrainConfig& config, const Explanation& expl,
                       TrainTrace* trace) {
  validate_explanation(dataset, expl);
  return train(remove_interactions(dataset, expl.user, expl.items), config,
               trace);
}

FactorModel cf_finetune(const FactorModel& base_model,
                        const InteractionDataset& dataset,
                        const Explanation& expl, std::size_t iterations) {
  if (!base_model.user_index(expl.user)) {
    throw DataError("model has no factor for user " +
                    std::to_string(raw(expl.user)));
  }
  validate_explanation(dataset, expl);
  std::vector<std::pair<ItemId, double>> remaining;
  for (const auto& row : dataset.interactions_of(expl.user)) {
    if (!std::binary_search(expl.items.begin(), expl.items.end(), row.item)) {
      remaining.emplace_back(row.item, row.rating);
    }
  }
  Eigen::RowVectorXd factor =
      Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(base_model.dim()));
  if (!remaining.empty()) {
    // Item factors are frozen, so every pass solves the same system.
    for (std::size_t it = 0; it < iterations; ++it) {
      factor = fold_in_user(base_model, remaining,
                            base_model.config().regularization);
    }
  }
  return base_model.with_user_factor(expl.user, factor);
}

CounterfactualContext make_context(const InteractionDataset& dataset,
                                   std::shared_ptr<const FactorModel> cf_model,
                                   const Explanation& expl) {
  CounterfactualContext ctx;
  ctx.user = expl.user;
  ctx.recommended_item = expl.recommended_item;
  ctx.base_candidates = dataset.items_not_of(expl.user);
  std::set_union(ctx.base_candidates.begin(), ctx.base_candidates.end(),
                 expl.items.begin(), expl.items.end(),
                 std::back_inserter(ctx.cf_candidates));
  if (ctx.cf_candidates.empty()) {
    throw DataError("no counterfactual candidates for user " +
                    std::to_string(raw(expl.user)));
  }
  ctx.raw_scores = scores_for(*cf_model, expl.user, ctx.cf_candidates);
  ctx.normalized_scores = normalize_scores(ctx.raw_scores);
  ctx.cf_model = std::move(cf_model);
  return ctx;
}

bool cf_qualitative(const CounterfactualContext& context, ItemId item) {
  if (position(context.cf_candidates, item) == static_cast<std::size_t>(-1)) {
    throw DataError("item " + std::to_string(raw(item)) +
                    " is not a counterfactual candidate");
  }
  const std::size_t top = best_index(context.raw_scores);
  return context.cf_candidates[top] != item;
}

CfResult evaluate_context(const CounterfactualContext& context,
                          CfStrategy strategy) {
  const std::size_t target =
      position(context.cf_candidates, context.recommended_item);
  if (target == static_cast<std::size_t>(-1)) {
    throw std::logic_error("recommended item missing from I_u^{-cf}");
  }
  if (context.cf_candidates.size() < 2) {
    throw DataError("a benchmark item needs at least two candidates");
  }
  const std::size_t bench = best_index(context.raw_scores, target);
  CfResult result;
  result.strategy = strategy;
  result.benchmark_item = context.cf_candidates[bench];
  const double gap =
      context.normalized_scores[bench] - context.normalized_scores[target];
  result.score = std::clamp(gap, -1.0, 1.0);
  result.qualitative = result.score > 0.0;
  return result;
}

FactorModel FullRetrainProvider::counterfactual_model(
    const InteractionDataset& dataset, const FactorModel& /*base_model*/,
    const Explanation& expl, TrainTrace* trace) const {
  return cf_retrain(dataset, config_, expl, trace);
}

FactorModel WarmStartFinetuneProvider::counterfactual_model(
    const InteractionDataset& dataset, const FactorModel& base_model,
    const Explanation& expl, TrainTrace* trace) const {
  if (trace) trace->objective.clear();
  return cf_finetune(base_model, dataset, expl, iterations_);
}

std::unique_ptr<CounterfactualProvider> make_provider(
    CfStrategy strategy, const TrainConfig& config,
    std::size_t finetune_iterations) {
  switch (strategy) {
    case CfStrategy::kFullRetrain:
      return std::make_unique<FullRetrainProvider>(config);
    case CfStrategy::kWarmStartFinetune:
      return std::make_unique<WarmStartFinetuneProvider>(finetune_iterations);
  }
  throw ConfigError("unknown strategy");
}

ItemId recommend(const InteractionDataset& dataset, const FactorModel& model,
                 UserId user) {
  const auto candidates = dataset.items_not_of(user);
  if (candidates.empty()) {
    throw DataError("user " + std::to_string(raw(user)) +
                    " has interacted with every item");
  }
  const auto scores = scores_for(model, user, candidates);
  return candidates[best_index(scores)];
}

CfResult cf_score(const InteractionDataset& dataset,
                  const FactorModel& base_model, const Explanation& expl,
                  const CounterfactualProvider& provider, TrainTrace* trace,
                  CounterfactualContext* context_out) {
  validate_explanation(dataset, expl);
  const ItemId actual = recommend(dataset, base_model, expl.user);
  if (actual != expl.recommended_item) {
    std::ostringstream os;
    os << "explanation claims item " << expl.recommended_item
       << " was recommended to user " << expl.user << ", but the model picks "
       << actual;
    throw ValidationError(os.str());
  }
  auto cf_model = std::make_shared<const FactorModel>(
      provider.counterfactual_model(dataset, base_model, expl, trace));
  CounterfactualContext ctx = make_context(dataset, std::move(cf_model), expl);
  CfResult result = evaluate_context(ctx, provider.strategy());
  if (context_out) *context_out = std::move(ctx);
  return result;
}

CfResult cf_score(const InteractionDataset& dataset, const TrainConfig& config,
                  const FactorModel& base_model, const Explanation& expl,
                  CfStrategy strategy, std::size_t finetune_iterations) {
  const auto provider = make_provider(strategy, config, finetune_iterations);
  return cf_score(dataset, base_model, expl, *provider);
}

}  // namespace cfprox
