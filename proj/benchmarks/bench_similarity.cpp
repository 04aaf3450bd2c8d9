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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mstm/similarity.hpp"
#include "mstm/types.hpp"

namespace {

std::vector<float> random_vec(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> gauss(0.0f, 1.0f);
  std::vector<float> v(dim);
  for (auto& x : v) x = gauss(rng);
  return v;
}

void BM_InnerProduct(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::size_t dim = static_cast<std::size_t>(state.range(0));
  auto a = random_vec(rng, dim);
  auto b = random_vec(rng, dim);
  for (auto _ : state)
    benchmark::DoNotOptimize(mstm::inner_product(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_InnerProduct)->Arg(64)->Arg(256)->Arg(1024);

void BM_SquaredL2(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::size_t dim = static_cast<std::size_t>(state.range(0));
  auto a = random_vec(rng, dim);
  auto b = random_vec(rng, dim);
  for (auto _ : state)
    benchmark::DoNotOptimize(mstm::squared_l2(a, b));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SquaredL2)->Arg(64)->Arg(256)->Arg(1024);

void BM_JointSimilarity(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::size_t mods = static_cast<std::size_t>(state.range(0));
  std::vector<std::vector<float>> qa(mods), qb(mods);
  std::vector<float> weights(mods, 0.7f);
  for (std::size_t i = 0; i < mods; ++i) {
    qa[i] = random_vec(rng, 128);
    qb[i] = random_vec(rng, 128);
  }
  mstm::WeightVector w(weights);
  mstm::MultiVectorView va, vb;
  for (std::size_t i = 0; i < mods; ++i) {
    va.parts.push_back(qa[i]);
    vb.parts.push_back(qb[i]);
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(mstm::joint_similarity(va, vb, w));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_JointSimilarity)->Arg(1)->Arg(2)->Arg(4);

}  // namespace
