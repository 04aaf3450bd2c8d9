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

#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "mstm/baselines.hpp"
#include "mstm/error.hpp"
#include "mstm/synthetic.hpp"
#include "mstm/weights_learn.hpp"
#include "test_util.hpp"

using namespace mstm;

namespace {

// Straight-line loss oracle: softmax cross-entropy of the positive among
// positive + negatives, scores by the naive dot-product route.
double naive_loss(const std::vector<TrainingPair>& batch,
                  const std::vector<std::vector<std::uint32_t>>& negatives,
                  const MultiModalDataset& data, const std::vector<double>& w) {
  double total = 0.0;
  for (std::size_t a = 0; a < batch.size(); ++a) {
    if (negatives[a].empty()) continue;
    auto score = [&](std::uint32_t id) {
      double s = 0.0;
      for (std::size_t mod = 0; mod < data.modalities(); ++mod) {
        if (!batch[a].anchor.present(mod)) continue;
        auto v = data.vec(mod, id);
        double dot = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d)
          dot += static_cast<double>(batch[a].anchor.parts[mod][d]) * v[d];
        s += w[mod] * w[mod] * dot;
      }
      return s;
    };
    double pos = score(batch[a].positive);
    double denom = std::exp(pos);
    for (std::uint32_t neg : negatives[a]) denom += std::exp(score(neg));
    total += -std::log(std::exp(pos) / denom);
  }
  return total / static_cast<double>(batch.size());
}

// Small training problem: anchors perturb objects of a clustered set.
struct Problem {
  MultiModalDataset data;
  std::vector<TrainingPair> pairs;
};

Problem cluster_problem(std::size_t n, std::size_t anchors,
                        int noise_modality, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.count = n;
  spec.dims = {12, 6};
  spec.clusters = 12;
  spec.noise_scale = 0.25;
  spec.query_noise = 0.1;
  spec.noise_modality = noise_modality;
  spec.queries = anchors;
  spec.rng_seed = seed;
  SyntheticData gen = generate_synthetic(spec);
  Problem p{std::move(gen.objects), {}};
  for (std::size_t q = 0; q < gen.queries.size(); ++q)
    p.pairs.push_back({gen.queries[q], gen.sources[q]});
  return p;
}

}  // namespace

TEST_SUITE("weights") {

TEST_CASE("mine_negatives equals the exact top-k minus the positive") {
  for (std::uint64_t seed : {3ull, 4ull}) {
    auto data = testutil::random_dataset(150, {10, 5}, seed);
    WeightVector w({0.9f, 0.4f});
    std::mt19937_64 rng(seed + 100);
    for (int trial = 0; trial < 20; ++trial) {
      std::uint32_t positive = rng() % data.size();
      auto anchor = testutil::query_of(data, rng() % data.size());
      std::size_t k = 1 + trial % 8;
      auto mined = mine_negatives(anchor, positive, data, w, k);

      auto top = testutil::naive_topk_ids(data, anchor, w, k);
      std::vector<std::uint32_t> expect;
      for (std::uint32_t id : top)
        if (id != positive) expect.push_back(id);
      CHECK(mined == expect);
      CHECK(mined.size() >= k - 1);
      CHECK(mined.size() <= k);
      for (std::uint32_t id : mined) CHECK(id != positive);
    }
  }
}

TEST_CASE("loss of an empty negative set is zero") {
  auto data = testutil::random_dataset(10, {4}, 1);
  std::vector<TrainingPair> batch{{testutil::query_of(data, 3), 3}};
  std::vector<std::vector<std::uint32_t>> negatives{{}};
  CHECK(contrastive_loss(batch, negatives, data, std::vector<double>{1.0}) ==
        0.0);
}

TEST_CASE("equal scores give log 2") {
  // Positive and negative are the identical object, so the softmax is a
  // fair coin.
  MultiModalDataset data(2, {3});
  float v[3] = {0.6f, 0.0f, 0.8f};
  for (std::size_t id = 0; id < 2; ++id)
    std::copy(v, v + 3, data.mutable_vec(0, id).begin());
  std::vector<TrainingPair> batch{{testutil::query_of(data, 0), 0}};
  std::vector<std::vector<std::uint32_t>> negatives{{1}};
  double loss =
      contrastive_loss(batch, negatives, data, std::vector<double>{0.7});
  CHECK(loss == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("loss matches a straight-line oracle and stays non-negative") {
  auto data = testutil::random_dataset(60, {8, 5}, 7);
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<double> uw(0.2, 1.5);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<TrainingPair> batch;
    std::vector<std::vector<std::uint32_t>> negatives;
    std::size_t bs = 1 + trial % 5;
    for (std::size_t a = 0; a < bs; ++a) {
      batch.push_back(
          {testutil::query_of(data, rng() % data.size()),
           static_cast<std::uint32_t>(rng() % data.size())});
      std::vector<std::uint32_t> negs;
      for (std::size_t j = 0; j < 1 + (trial + a) % 6; ++j)
        negs.push_back(rng() % data.size());
      negatives.push_back(std::move(negs));
    }
    std::vector<double> w{uw(rng), uw(rng)};
    double lib = contrastive_loss(batch, negatives, data, w);
    CHECK(lib == doctest::Approx(naive_loss(batch, negatives, data, w))
                     .epsilon(1e-9));
    CHECK(lib >= 0.0);
  }
}

TEST_CASE("analytic gradient matches central finite differences") {
  auto data = testutil::random_dataset(50, {9, 4, 6}, 21);
  std::mt19937_64 rng(210);
  std::uniform_real_distribution<double> uw(0.2, 1.4);
  const double h = 1e-4;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<TrainingPair> batch;
    std::vector<std::vector<std::uint32_t>> negatives;
    for (std::size_t a = 0; a < 4; ++a) {
      batch.push_back(
          {testutil::query_of(data, rng() % data.size()),
           static_cast<std::uint32_t>(rng() % data.size())});
      std::vector<std::uint32_t> negs;
      for (std::size_t j = 0; j < 3; ++j) negs.push_back(rng() % data.size());
      negatives.push_back(std::move(negs));
    }
    std::vector<double> w{uw(rng), uw(rng), uw(rng)};
    auto grad = loss_gradient(batch, negatives, data, w);
    REQUIRE(grad.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      auto wp = w, wm = w;
      wp[i] += h;
      wm[i] -= h;
      double fd = (contrastive_loss(batch, negatives, data, wp) -
                   contrastive_loss(batch, negatives, data, wm)) /
                  (2.0 * h);
      double denom = std::max(std::abs(fd), std::abs(grad[i]));
      if (denom < 1e-7)
        CHECK(std::abs(fd - grad[i]) < 1e-7);
      else
        CHECK(std::abs(fd - grad[i]) / denom < 1e-4);
    }
  }
}

TEST_CASE("training prefers the signal modality") {
  Problem p = cluster_problem(600, 80, 1, 42);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.iterations = 250;
  cfg.negatives = 5;
  cfg.minibatch = 32;
  cfg.rng_seed = 5;
  TrainReport report = train_weights(p.pairs, p.data, cfg);
  double sig = report.weights.squared(0);
  double noise = report.weights.squared(1);
  CHECK(sig / (sig + noise) > 0.7);
  CHECK(report.loss.size() == cfg.iterations);
  CHECK(report.recall.size() == cfg.iterations);
  CHECK(report.loss.back() < report.loss.front());
}

TEST_CASE("clean aligned data trains to high training recall") {
  Problem p = cluster_problem(400, 80, -1, 11);
  TrainConfig cfg;
  cfg.learning_rate = 0.01;
  cfg.iterations = 400;
  cfg.negatives = 5;
  cfg.minibatch = 40;
  cfg.rng_seed = 2;
  TrainReport report = train_weights(p.pairs, p.data, cfg);
  CHECK(report.recall.back() >= 0.85);
  CHECK(report.loss.back() < report.loss.front());
}

TEST_CASE("training is deterministic under a fixed seed") {
  Problem p = cluster_problem(200, 30, -1, 9);
  TrainConfig cfg;
  cfg.iterations = 60;
  cfg.learning_rate = 0.01;
  cfg.negatives = 4;
  cfg.minibatch = 16;
  cfg.rng_seed = 77;
  TrainReport a = train_weights(p.pairs, p.data, cfg);
  TrainReport b = train_weights(p.pairs, p.data, cfg);
  CHECK(a.weights.raw() == b.weights.raw());
  CHECK(a.loss == b.loss);
  CHECK(a.recall == b.recall);

  cfg.mining = MiningStrategy::kRandom;
  TrainReport c = train_weights(p.pairs, p.data, cfg);
  TrainReport d = train_weights(p.pairs, p.data, cfg);
  CHECK(c.weights.raw() == d.weights.raw());
  CHECK(c.loss == d.loss);
}

TEST_CASE("scaling all weights preserves exact rankings") {
  auto data = testutil::random_dataset(120, {7, 5}, 33);
  WeightVector w({0.8f, 0.45f});
  WeightVector scaled({1.6f, 0.9f});
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 10; ++trial) {
    auto q = testutil::query_of(data, rng() % data.size());
    auto a = brute_force_topk(data, q, w, 12);
    auto b = brute_force_topk(data, q, scaled, 12);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].id == b[i].id);
  }
}

TEST_CASE("trainer rejects bad configurations") {
  Problem p = cluster_problem(50, 8, -1, 3);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train_weights(p.pairs, p.data, cfg), UsageError);
  cfg = TrainConfig{};
  cfg.iterations = 0;
  CHECK_THROWS_AS(train_weights(p.pairs, p.data, cfg), UsageError);
  cfg = TrainConfig{};
  CHECK_THROWS_AS(train_weights({}, p.data, cfg), UsageError);

  auto bad_pairs = p.pairs;
  bad_pairs[0].positive = 5000;
  CHECK_THROWS_AS(train_weights(bad_pairs, p.data, TrainConfig{}), UsageError);
}

}  // TEST_SUITE
