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

#include "cfprox/dataset.hpp"

namespace cfprox {

// Shape of a synthetic explicit-feedback dataset. Defaults reproduce the
// size of MovieLens ml-latest-small (610 users, 9742 movies, 100836
// ratings) with a long-tailed item popularity curve.
struct SyntheticSpec {
  std::size_t users = 610;
  std::size_t items = 9742;
  std::size_t ratings = 100836;
  std::size_t min_per_user = 20;
  std::size_t latent_dim = 6;
  // Zipf exponent of the item popularity curve.
  double popularity_exponent = 1.1;
  double noise_sd = 0.6;
  std::uint64_t seed = 20220101;
};

// Ratings come from a noisy low-rank model on the half-star scale; genres
// are drawn from the MovieLens vocabulary and correlate with the latent
// item vectors.
InteractionDataset make_synthetic(const SyntheticSpec& spec);

}  // namespace cfprox
