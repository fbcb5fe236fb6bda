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

// Serial reference vs OpenMP drivers of the ALS kernels on the
// ml-latest-small sized synthetic dataset, d = 40.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "cfprox/als_kernels.hpp"
#include "cfprox/mf.hpp"
#include "cfprox/synthetic.hpp"

namespace {

using cfprox::FactorMatrix;

struct Fixture {
  cfprox::RatingMatrix matrix;
  FactorMatrix users;
  FactorMatrix items;

  Fixture() : matrix(cfprox::rating_matrix(cfprox::make_synthetic({}))) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> init(-0.1, 0.1);
    users.resize(static_cast<Eigen::Index>(matrix.by_user.rows()), 40);
    items.resize(static_cast<Eigen::Index>(matrix.by_item.rows()), 40);
    for (Eigen::Index k = 0; k < users.size(); ++k) users.data()[k] = init(rng);
    for (Eigen::Index k = 0; k < items.size(); ++k) items.data()[k] = init(rng);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_ItemHalfSweepSerial(benchmark::State& state) {
  const auto& f = fixture();
  FactorMatrix out = f.items;
  for (auto _ : state) {
    cfprox::half_sweep_serial(f.matrix.by_item, f.users, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ItemHalfSweepParallel(benchmark::State& state) {
  const auto& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  FactorMatrix out = f.items;
  for (auto _ : state) {
    cfprox::half_sweep_parallel(f.matrix.by_item, f.users, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_UserHalfSweepSerial(benchmark::State& state) {
  const auto& f = fixture();
  FactorMatrix out = f.users;
  for (auto _ : state) {
    cfprox::half_sweep_serial(f.matrix.by_user, f.items, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_UserHalfSweepParallel(benchmark::State& state) {
  const auto& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  FactorMatrix out = f.users;
  for (auto _ : state) {
    cfprox::half_sweep_parallel(f.matrix.by_user, f.items, 0.05, out);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_ObjectiveSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfprox::als_objective_serial(f.matrix.by_user, f.users, f.items, 0.05));
  }
}

void BM_ObjectiveParallel(benchmark::State& state) {
  const auto& f = fixture();
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cfprox::als_objective_parallel(f.matrix.by_user, f.users, f.items, 0.05));
  }
}

}  // namespace

BENCHMARK(BM_ItemHalfSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ItemHalfSweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UserHalfSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_UserHalfSweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ObjectiveSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ObjectiveParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
