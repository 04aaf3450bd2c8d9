// Copyright 2026 The MSTM Authors.
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

#include <cstddef>
#include <memory>
#include <vector>

#include <benchmark/benchmark.h>

#include "mstm/baselines.hpp"
#include "mstm/index.hpp"
#include "mstm/search.hpp"
#include "mstm/synthetic.hpp"

namespace {

struct World {
  mstm::MultiModalDataset data;
  std::vector<mstm::MultiModalQuery> queries;
  mstm::WeightVector w;
  mstm::FusedIndex index;
};

// Built once and shared across benchmark registrations.
const World& world() {
  static const World* w = [] {
    mstm::SyntheticSpec spec;
    spec.count = 20000;
    spec.dims = {16, 8};
    spec.clusters = 100;
    spec.noise_scale = 0.25;
    spec.query_noise = 0.1;
    spec.queries = 64;
    spec.rng_seed = 9;
    mstm::SyntheticData gen = mstm::generate_synthetic(spec);
    mstm::WeightVector weights({0.92f, 0.39f});
    mstm::BuildParams params;
    params.max_neighbors = 30;
    params.nn_descent_iters = 3;
    params.rng_seed = 9;
    mstm::FusedIndex index =
        mstm::build_fused_index(gen.objects, weights, params);
    return new World{std::move(gen.objects), std::move(gen.queries), weights,
                     std::move(index)};
  }();
  return *w;
}

void BM_JointSearch(benchmark::State& state) {
  const World& w = world();
  mstm::JointSearcher searcher(w.data, w.index);
  mstm::SearchParams params;
  params.k = 10;
  params.l = static_cast<std::size_t>(state.range(0));
  params.pruning = state.range(1) != 0;
  std::size_t qi = 0;
  for (auto _ : state) {
    auto out = searcher.search(w.queries[qi], w.w, params);
    benchmark::DoNotOptimize(out.ids.data());
    qi = (qi + 1) % w.queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_JointSearch)
    ->Args({500, 1})
    ->Args({500, 0})
    ->Args({2000, 1})
    ->Args({2000, 0})
    ->Args({4000, 1})
    ->Args({4000, 0});

void BM_BruteForce(benchmark::State& state) {
  const World& w = world();
  std::size_t qi = 0;
  for (auto _ : state) {
    auto out = mstm::brute_force_topk(w.data, w.queries[qi], w.w, 10);
    benchmark::DoNotOptimize(out.data());
    qi = (qi + 1) % w.queries.size();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BruteForce);

void BM_BuildIndex(benchmark::State& state) {
  mstm::SyntheticSpec spec;
  spec.count = static_cast<std::size_t>(state.range(0));
  spec.dims = {16, 8};
  spec.clusters = 50;
  spec.noise_scale = 0.25;
  spec.queries = 1;
  spec.rng_seed = 13;
  mstm::SyntheticData gen = mstm::generate_synthetic(spec);
  mstm::WeightVector weights({0.92f, 0.39f});
  for (auto _ : state) {
    mstm::BuildParams params;
    params.max_neighbors = 30;
    params.nn_descent_iters = 3;
    params.rng_seed = 13;
    auto index = mstm::build_fused_index(gen.objects, weights, params);
    benchmark::DoNotOptimize(index.adj.size());
  }
}
BENCHMARK(BM_BuildIndex)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
