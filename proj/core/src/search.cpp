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

#include "mstm/search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <unordered_set>

#include "mstm/error.hpp"
#include "mstm/log.hpp"
#include "mstm/similarity.hpp"
#include "scorer.hpp"

namespace mstm {
namespace {

constexpr std::uint64_t kSampleSeed = 0x5EED5EEDull;
constexpr std::size_t kSamplePairs = 256;

struct Entry {
  float score;
  std::uint32_t id;
};

// Highest score first, ties by lower id.
struct BestOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.score != b.score) return a.score < b.score;
    return a.id > b.id;
  }
};

// Lowest score first, ties by higher id (the pool member evicted first).
struct WorstOrder {
  bool operator()(const Entry& a, const Entry& b) const {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  }
};

}  // namespace

PruneResult pruned_joint_ip(const MultiModalQuery& q, const MultiVectorView& u,
                            const WeightVector& w, float threshold) {
  double c = 0.0;
  std::vector<std::size_t> eff;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (q.present(i) && u.present(i) && w.weight(i) > 0.0f) {
      eff.push_back(i);
      c += w.squared(i);
    }
  double acc = 0.0;
  float bound = static_cast<float>(c);
  for (std::size_t j = 0; j < eff.size(); ++j) {
    std::size_t mod = eff[j];
    acc += w.squared(mod) * squared_l2(q.parts[mod], u.parts[mod]);
    bound = static_cast<float>(c - 0.5 * acc);
    if (threshold >= bound) return {true, j + 1, bound};
  }
  return {false, eff.size(), bound};
}

JointSearcher::JointSearcher(const MultiModalDataset& data,
                             const FusedIndex& index)
    : data_(&data), index_(&index) {
  if (index.adj.size() != data.size())
    throw UsageError("searcher: index size does not match dataset");
  if (index.weights.size() != data.modalities())
    throw UsageError("searcher: index modality count does not match dataset");
  if (index.fingerprint != 0 && index.fingerprint != data.fingerprint())
    throw UsageError("searcher: index fingerprint does not match dataset");
  std::size_t m = data.modalities();
  expected_d2_.assign(m, 0.0);
  std::size_t n = data.size();
  if (n < 2) return;
  std::mt19937_64 rng(kSampleSeed);
  std::uniform_int_distribution<std::uint32_t> pick(
      0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t s = 0; s < kSamplePairs; ++s) {
    std::uint32_t a = pick(rng);
    std::uint32_t b = pick(rng);
    if (b == a) b = (a + 1) % n;
    for (std::size_t mod = 0; mod < m; ++mod)
      expected_d2_[mod] += squared_l2(data.vec(mod, a), data.vec(mod, b));
  }
  for (double& v : expected_d2_) v /= static_cast<double>(kSamplePairs);
}

SearchOutcome JointSearcher::search(const MultiModalQuery& q,
                                    const WeightVector& w,
                                    const SearchParams& params,
                                    std::vector<double>* trace) const {
  std::size_t n = data_->size();
  if (n == 0) throw UsageError("search: empty dataset");
  if (w.size() != data_->modalities())
    throw UsageError("search: weight count does not match dataset");
  if (params.k < 1) throw UsageError("search: k must be >= 1");
  if (params.k > n) throw UsageError("search: k exceeds dataset size");

  std::size_t l = params.l == 0 ? std::min(20 * params.k, n) : params.l;
  if (l > n) {
    MSTM_LOG_WARN("search: l=", l, " exceeds n=", n, ", clamped");
    l = n;
  }
  if (l < params.k) throw UsageError("search: l must be >= k");

  std::vector<std::size_t> order = detail::effective_modalities(q, w);
  if (order.empty()) throw UsageError("search: query has no usable modality");
  if (!params.fixed_scan_order) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return w.squared(a) * expected_d2_[a] >
                              w.squared(b) * expected_d2_[b];
                     });
  }
  detail::QueryScorer scorer(*data_, q, w, order);

  SearchOutcome out;
  const float kNoThreshold = -std::numeric_limits<float>::infinity();

  // Pool bookkeeping. score_of is valid only for ids in the pool.
  std::vector<char> visited(n, 0);
  std::vector<char> in_pool(n, 0);
  std::vector<float> score_of(n, 0.0f);
  std::size_t pool_count = 0;
  double pool_sum = 0.0;
  std::priority_queue<Entry, std::vector<Entry>, BestOrder> best;
  std::priority_queue<Entry, std::vector<Entry>, WorstOrder> worst;

  auto current_threshold = [&]() -> float {
    if (pool_count < l) return kNoThreshold;
    while (!worst.empty() && (!in_pool[worst.top().id] ||
                              score_of[worst.top().id] != worst.top().score))
      worst.pop();
    return worst.empty() ? kNoThreshold : worst.top().score;
  };

  auto evict_worst = [&]() {
    while (!worst.empty() && (!in_pool[worst.top().id] ||
                              score_of[worst.top().id] != worst.top().score))
      worst.pop();
    Entry z = worst.top();
    worst.pop();
    in_pool[z.id] = 0;
    --pool_count;
    pool_sum -= static_cast<double>(z.score);
  };

  auto insert = [&](std::uint32_t id, float score) {
    if (pool_count == l) evict_worst();
    in_pool[id] = 1;
    score_of[id] = score;
    ++pool_count;
    pool_sum += static_cast<double>(score);
    best.push({score, id});
    worst.push({score, id});
  };

  // Offer a candidate: score it against the admission threshold and
  // insert unless rejected. A candidate counts as pruned only when the
  // scan stopped before the last effective modality; one scanned to the
  // end is a full evaluation whether or not it makes the pool.
  auto offer = [&](std::uint32_t id) {
    PruneResult r = scorer.score(id, current_threshold(), params.pruning);
    out.modality_scans += r.scanned;
    if (r.scanned < scorer.effective()) {
      ++out.pruned_evals;
      return;
    }
    ++out.full_evals;
    if (r.pruned) return;
    insert(id, r.value);
  };

  // Pool initialization: seed plus l-1 distinct random non-seed vertices.
  std::uint32_t seed = index_->seed;
  offer(seed);
  if (!params.seed_only_init && l > 1) {
    std::vector<std::uint32_t> others;
    others.reserve(n - 1);
    for (std::size_t v = 0; v < n; ++v)
      if (v != seed) others.push_back(static_cast<std::uint32_t>(v));
    std::mt19937_64 rng(params.rng_seed);
    std::size_t want = l - 1;
    for (std::size_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, others.size() - 1);
      std::swap(others[i], others[pick(rng)]);
      offer(others[i]);
    }
  }

  // Greedy expansion.
  while (true) {
    Entry top{0.0f, 0};
    bool found = false;
    while (!best.empty()) {
      top = best.top();
      if (!in_pool[top.id] || score_of[top.id] != top.score || visited[top.id]) {
        best.pop();
        continue;
      }
      found = true;
      break;
    }
    if (!found) break;
    best.pop();
    visited[top.id] = 1;
    ++out.visited;
    for (std::uint32_t u : index_->adj[top.id]) {
      if (visited[u] || in_pool[u]) continue;
      offer(u);
    }
    if (trace != nullptr) trace->push_back(pool_sum);
  }

  // Gather the pool and keep the best k.
  std::vector<Entry> pool;
  pool.reserve(pool_count);
  for (std::size_t id = 0; id < n; ++id)
    if (in_pool[id])
      pool.push_back({score_of[id], static_cast<std::uint32_t>(id)});
  std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.id < b.id;
  });
  std::size_t take = std::min(params.k, pool.size());
  out.ids.reserve(take);
  out.scores.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    out.ids.push_back(pool[i].id);
    out.scores.push_back(pool[i].score);
  }
  return out;
}

SearchOutcome joint_search(const MultiModalDataset& data,
                           const FusedIndex& index, const MultiModalQuery& q,
                           const WeightVector& w, const SearchParams& params,
                           std::vector<double>* trace) {
  JointSearcher searcher(data, index);
  return searcher.search(q, w, params, trace);
}

}  // namespace mstm
