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

#ifndef MSTM_SEARCH_HPP_
#define MSTM_SEARCH_HPP_

#include <cstdint>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/index.hpp"
#include "mstm/types.hpp"

namespace mstm {

struct SearchParams {
  std::size_t k = 10;
  std::size_t l = 0;  // 0: min(20*k, n); l > n is clamped to n with a warning
  std::uint64_t rng_seed = 1;
  bool pruning = true;
  bool seed_only_init = false;   // start from the seed alone, no random pool
  bool fixed_scan_order = false; // scan modalities in index order
};

struct SearchOutcome {
  std::vector<std::uint32_t> ids;  // descending score, ties by lower id
  std::vector<Score> scores;
  std::uint64_t visited = 0;         // vertices expanded
  std::uint64_t full_evals = 0;      // candidates scored across all modalities
  std::uint64_t pruned_evals = 0;    // candidates discarded early
  std::uint64_t modality_scans = 0;  // per-modality distance computations
};

// Outcome of one incremental evaluation. When pruned, `value`
// holds the partial upper bound after `scanned` modalities; otherwise the
// exact joint IP.
struct PruneResult {
  bool pruned = false;
  std::size_t scanned = 0;
  float value = 0.0f;
};

// Incremental joint IP of query q against object view u under weights w,
// scanning modalities in index order. After each modality the upper
// bound C - 0.5 * sum w_i^2 ||q_i - u_i||^2 is compared against
// `threshold`; the scan stops pruned as soon as threshold >= bound.
// C counts the modalities present in q with positive weight.
PruneResult pruned_joint_ip(const MultiModalQuery& q, const MultiVectorView& u,
                            const WeightVector& w, float threshold);

// Greedy best-first search over one fused index. Holds the expected
// per-modality squared distances sampled at construction, which order the
// modality scan for pruning (largest expected contribution first).
class JointSearcher {
 public:
  // Verifies that the index fingerprint matches the dataset.
  JointSearcher(const MultiModalDataset& data, const FusedIndex& index);

  // Algorithm: the pool R starts with the seed plus l-1 distinct random
  // vertices (or the seed alone with seed_only_init); each iteration
  // expands the unvisited pool member with the highest score and offers
  // every unseen neighbor to the pool, which keeps the l best. Ends when
  // the pool is fully visited. If `trace` is non-null, the sum of pool
  // scores is appended after every iteration.
  SearchOutcome search(const MultiModalQuery& q, const WeightVector& w,
                       const SearchParams& params,
                       std::vector<double>* trace = nullptr) const;

  const MultiModalDataset& data() const { return *data_; }
  const FusedIndex& index() const { return *index_; }

 private:
  const MultiModalDataset* data_;
  const FusedIndex* index_;
  std::vector<double> expected_d2_;  // per modality, from sampled pairs
};

// One-shot convenience wrapper: search with the weights stored in the
// index unless `w` is supplied.
SearchOutcome joint_search(const MultiModalDataset& data,
                           const FusedIndex& index, const MultiModalQuery& q,
                           const WeightVector& w, const SearchParams& params,
                           std::vector<double>* trace = nullptr);

}  // namespace mstm

#endif  // MSTM_SEARCH_HPP_
