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

#ifndef MSTM_BASELINES_HPP_
#define MSTM_BASELINES_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/index.hpp"
#include "mstm/search.hpp"
#include "mstm/types.hpp"

namespace mstm {

// Exact top-k by joint similarity, full scan, ties by lower id. The
// ground-truth oracle. Scores use the same arithmetic as joint_search.
std::vector<Neighbor> brute_force_topk(const MultiModalDataset& data,
                                       const MultiModalQuery& q,
                                       const WeightVector& w, std::size_t k);

// Single-vector baseline: search a modality-0-only index with an
// externally supplied composition vector.
SearchOutcome je_search(const MultiModalDataset& target_data,
                        const FusedIndex& target_index,
                        std::span<const float> composition_query,
                        const SearchParams& params);

// One index per modality, each built with a one-hot weight on that
// modality over the full dataset.
struct MrIndexSet {
  std::vector<FusedIndex> indexes;
};

MrIndexSet build_mr_indexes(const MultiModalDataset& data,
                            const BuildParams& params);

struct MergePolicy {
  std::size_t candidates = 0;  // c per stream; 0 means k
  std::size_t k = 10;
};

struct MrOutcome {
  std::vector<std::uint32_t> ids;
  std::vector<std::vector<std::uint32_t>> stream_ids;  // per searched stream
  std::uint64_t visited = 0;
  std::uint64_t full_evals = 0;
  std::uint64_t pruned_evals = 0;
  std::uint64_t modality_scans = 0;
};

// Multi-streamed retrieval: one search per query-present modality, each
// returning c candidates; candidates ranked by (membership in all
// streams, rank sum, id) and truncated to k. A non-empty `composition`
// replaces the modality-0 stream's query vector. With empty
// `stream_params.l` semantics per joint_search. When `exact` is set the
// streams use brute force instead of graph search.
MrOutcome mr_search(const MultiModalDataset& data, const MrIndexSet& set,
                    const MultiModalQuery& q, const MergePolicy& policy,
                    const SearchParams& stream_params,
                    std::span<const float> composition = {},
                    bool exact = false);

}  // namespace mstm

#endif  // MSTM_BASELINES_HPP_
