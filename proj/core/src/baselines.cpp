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

#include "mstm/baselines.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "mstm/error.hpp"
#include "mstm/log.hpp"
#include "mstm/similarity.hpp"
#include "scorer.hpp"

namespace mstm {

std::vector<Neighbor> brute_force_topk(const MultiModalDataset& data,
                                       const MultiModalQuery& q,
                                       const WeightVector& w, std::size_t k) {
  std::size_t n = data.size();
  if (k < 1 || k > n) throw UsageError("brute_force_topk: k out of range");
  std::vector<std::size_t> order = detail::effective_modalities(q, w);
  if (order.empty())
    throw UsageError("brute_force_topk: query has no usable modality");
  detail::QueryScorer scorer(data, q, w, order);
  const float kNoThreshold = -std::numeric_limits<float>::infinity();
  std::vector<Neighbor> all;
  all.reserve(n);
  for (std::size_t id = 0; id < n; ++id) {
    PruneResult r =
        scorer.score(static_cast<std::uint32_t>(id), kNoThreshold, false);
    all.push_back({static_cast<std::uint32_t>(id), r.value});
  }
  std::partial_sort(all.begin(), all.begin() + k, all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.ip != b.ip) return a.ip > b.ip;
                      return a.id < b.id;
                    });
  all.resize(k);
  return all;
}

SearchOutcome je_search(const MultiModalDataset& target_data,
                        const FusedIndex& target_index,
                        std::span<const float> composition_query,
                        const SearchParams& params) {
  if (target_data.modalities() != 1)
    throw UsageError("je_search: index must cover exactly one modality");
  if (composition_query.size() != target_data.dim(0))
    throw UsageError("je_search: composition vector dimension mismatch");
  MultiModalQuery q;
  q.parts.push_back(
      std::vector<float>(composition_query.begin(), composition_query.end()));
  WeightVector w({1.0f});
  return joint_search(target_data, target_index, q, w, params);
}

MrIndexSet build_mr_indexes(const MultiModalDataset& data,
                            const BuildParams& params) {
  MrIndexSet set;
  std::size_t m = data.modalities();
  set.indexes.reserve(m);
  for (std::size_t mod = 0; mod < m; ++mod) {
    std::vector<float> one_hot(m, 0.0f);
    one_hot[mod] = 1.0f;
    MSTM_LOG_INFO("building MR stream index for modality ", mod);
    set.indexes.push_back(
        build_fused_index(data, WeightVector(one_hot), params));
  }
  return set;
}

MrOutcome mr_search(const MultiModalDataset& data, const MrIndexSet& set,
                    const MultiModalQuery& q, const MergePolicy& policy,
                    const SearchParams& stream_params,
                    std::span<const float> composition, bool exact) {
  std::size_t m = data.modalities();
  std::size_t k = policy.k;
  std::size_t c = policy.candidates == 0 ? k : policy.candidates;
  if (k < 1) throw UsageError("mr_search: k must be >= 1");
  if (c < k) throw UsageError("mr_search: candidate count below k");
  if (c > data.size()) {
    MSTM_LOG_WARN("mr_search: c=", c, " exceeds n=", data.size(), ", clamped");
    c = data.size();
  }
  if (!exact && set.indexes.size() != m)
    throw UsageError("mr_search: index set does not match modality count");

  // One stream per query-present modality. A composition vector replaces
  // the modality-0 query.
  MrOutcome out;
  std::vector<std::size_t> streams;
  for (std::size_t mod = 0; mod < m; ++mod) {
    bool present = q.present(mod) || (mod == 0 && !composition.empty());
    if (present) streams.push_back(mod);
  }
  if (streams.empty()) throw UsageError("mr_search: no query modality present");

  for (std::size_t mod : streams) {
    MultiModalQuery stream_q;
    stream_q.parts.resize(m);
    if (mod == 0 && !composition.empty())
      stream_q.parts[0].assign(composition.begin(), composition.end());
    else
      stream_q.parts[mod] = q.parts[mod];
    std::vector<float> one_hot(m, 0.0f);
    one_hot[mod] = 1.0f;
    WeightVector w(one_hot);
    std::vector<std::uint32_t> ids;
    if (exact) {
      auto top = brute_force_topk(data, stream_q, w, c);
      ids.reserve(top.size());
      for (const Neighbor& nb : top) ids.push_back(nb.id);
      out.full_evals += data.size();
      out.modality_scans += data.size();
    } else {
      SearchParams sp = stream_params;
      sp.k = c;
      if (sp.l != 0 && sp.l < c) sp.l = c;
      SearchOutcome so = joint_search(data, set.indexes[mod], stream_q, w, sp);
      ids = so.ids;
      out.visited += so.visited;
      out.full_evals += so.full_evals;
      out.pruned_evals += so.pruned_evals;
      out.modality_scans += so.modality_scans;
    }
    out.stream_ids.push_back(std::move(ids));
  }

  // Merge: rank of an id absent from a stream counts as c+1. Ids seen in
  // every stream sort ahead of the rest; then ascending rank sum, then id.
  struct Merged {
    std::uint32_t id;
    std::size_t rank_sum;
    std::size_t hits;
  };
  std::map<std::uint32_t, Merged> merged;
  for (const auto& ids : out.stream_ids) {
    for (std::size_t r = 0; r < ids.size(); ++r) {
      auto it = merged.try_emplace(ids[r], Merged{ids[r], 0, 0}).first;
      it->second.rank_sum += r + 1;
      it->second.hits += 1;
    }
  }
  std::size_t t = out.stream_ids.size();
  std::vector<Merged> rows;
  rows.reserve(merged.size());
  for (auto& [id, row] : merged) {
    row.rank_sum += (t - row.hits) * (c + 1);
    rows.push_back(row);
  }
  std::sort(rows.begin(), rows.end(), [&](const Merged& a, const Merged& b) {
    bool a_all = a.hits == t;
    bool b_all = b.hits == t;
    if (a_all != b_all) return a_all;
    if (a.rank_sum != b.rank_sum) return a.rank_sum < b.rank_sum;
    return a.id < b.id;
  });
  std::size_t take = std::min(k, rows.size());
  out.ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.ids.push_back(rows[i].id);
  return out;
}

}  // namespace mstm
