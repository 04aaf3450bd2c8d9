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

#ifndef MSTM_WEIGHTS_LEARN_HPP_
#define MSTM_WEIGHTS_LEARN_HPP_

#include <cstdint>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/types.hpp"

namespace mstm {

// A training anchor (query) with its known correct object.
struct TrainingPair {
  MultiModalQuery anchor;
  std::uint32_t positive = 0;
};

enum class MiningStrategy { kHard, kRandom };

struct TrainConfig {
  double learning_rate = 0.002;
  std::size_t iterations = 700;
  std::size_t negatives = 10;     // |N-| per anchor
  std::size_t minibatch = 64;     // M
  std::size_t remine_every = 50;  // steps between negative refreshes
  MiningStrategy mining = MiningStrategy::kHard;
  std::uint64_t rng_seed = 1;
};

// Loss and training-recall trajectories carry one entry per iteration,
// both measured against the top-`negatives` confusers under the weights
// after that iteration's update (the hard-negative curves), regardless of
// the mining strategy used for the gradient.
struct TrainReport {
  WeightVector weights;
  std::vector<double> loss;
  std::vector<double> recall;
};

// Hard negatives of one anchor: exact top-k of the dataset by joint
// similarity under w, minus the positive. Size k or k-1.
std::vector<std::uint32_t> mine_negatives(const MultiModalQuery& anchor,
                                          std::uint32_t positive,
                                          const MultiModalDataset& data,
                                          const WeightVector& w,
                                          std::size_t k);

// Mean contrastive loss over the batch: each anchor contributes
// -log softmax of the positive score among {positive} + negatives, all
// scores joint similarities under raw weights `w` (squared internally).
// An anchor with an empty negative set contributes 0.
double contrastive_loss(const std::vector<TrainingPair>& batch,
                        const std::vector<std::vector<std::uint32_t>>& negatives,
                        const MultiModalDataset& data,
                        const std::vector<double>& w);
double contrastive_loss(const std::vector<TrainingPair>& batch,
                        const std::vector<std::vector<std::uint32_t>>& negatives,
                        const MultiModalDataset& data, const WeightVector& w);

// Analytic gradient of contrastive_loss with negatives held fixed, using
// d IP / d w_i = 2 w_i IP_i per modality.
std::vector<double> loss_gradient(
    const std::vector<TrainingPair>& batch,
    const std::vector<std::vector<std::uint32_t>>& negatives,
    const MultiModalDataset& data, const std::vector<double>& w);

// Contrastive training: random weight init in (0,1], minibatch gradient
// descent with clamping at 0, negatives re-mined every remine_every steps
// under the current weights (hard) or redrawn uniformly (random).
TrainReport train_weights(const std::vector<TrainingPair>& pairs,
                          const MultiModalDataset& data,
                          const TrainConfig& cfg);

}  // namespace mstm

#endif  // MSTM_WEIGHTS_LEARN_HPP_
