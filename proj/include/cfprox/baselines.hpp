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

#include "cfprox/counterfactual.hpp"
#include "cfprox/dataset.hpp"
#include "cfprox/mf.hpp"

namespace cfprox {

// Cosine similarity of two item factors, clamped to [-1, 1]. Throws
// DataError when either factor has zero norm.
double item_cosine(const FactorModel& model, ItemId a, ItemId b);

// Jaccard index of two items' genre sets; two empty sets give 0.
double genre_jaccard(const GenreMap& genres, ItemId a, ItemId b);

// Mean over e in E of cosine(q_e, q_i), in [-1, 1].
double item_sim(const FactorModel& model, const Explanation& expl);

// Mean over e in E of Jaccard(G_e, G_i), in [0, 1].
double genre_jacc(const GenreMap& genres, const Explanation& expl);

}  // namespace cfprox
