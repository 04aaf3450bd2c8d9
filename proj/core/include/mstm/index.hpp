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

#ifndef MSTM_INDEX_HPP_
#define MSTM_INDEX_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/types.hpp"

namespace mstm {

struct BuildParams {
  std::size_t max_neighbors = 30;   // gamma
  std::size_t nn_descent_iters = 3; // epsilon
  std::uint64_t rng_seed = 1;
  int threads = 0;  // 0: library default
};

struct Neighbor {
  std::uint32_t id;
  float ip;
};

// Intermediate k-NN graph carrying fused-IP scores per edge.
using ScoredGraph = std::vector<std::vector<Neighbor>>;

// Proximity graph over joint similarity plus the search entry point.
// Adjacency is directed, at most gamma ids per vertex except vertices in
// `repaired`, which received connectivity-repair edges.
struct FusedIndex {
  std::vector<std::vector<std::uint32_t>> adj;
  std::uint32_t seed = 0;
  std::uint32_t gamma = 0;
  std::vector<float> weights;  // raw modality weights used at build time
  std::uint64_t fingerprint = 0;
  std::vector<std::uint32_t> repaired;  // sorted, sources of repair edges
  BuildParams params;  // echo; epsilon and seed are 0 on a loaded index

  std::size_t size() const { return adj.size(); }
  WeightVector weight_vector() const { return WeightVector(weights); }

  void save(const std::string& path) const;
  static FusedIndex load(const std::string& path);
};

// Random k-NN graph: every vertex gets exactly min(gamma, n-1) distinct
// non-self neighbors, scored by joint IP.
ScoredGraph init_random_graph(const MultiModalDataset& data,
                              const WeightVector& w, const BuildParams& params);

// One neighbors-of-neighbors refinement sweep: for each o, each v in
// N(o), each u in N(v) with u != o and u not already in N(o), replace the
// argmin-IP member z of N(o) with u iff IP(o,u) > IP(o,z). Reads a
// snapshot of the graph taken at sweep start, so the result does not
// depend on thread count.
void nn_descent_sweep(ScoredGraph& graph, const MultiModalDataset& data,
                      const WeightVector& w, int threads);

// Random init followed by `nn_descent_iters` sweeps.
ScoredGraph init_nndescent(const MultiModalDataset& data,
                           const WeightVector& w, const BuildParams& params);

// N(o) plus all neighbors of neighbors, excluding o, deduplicated.
// Returned ascending by id.
std::vector<std::uint32_t> acquire_candidates(const ScoredGraph& graph,
                                              std::uint32_t o);

// MRNG selection: candidates scanned in descending IP to o (ties by lower
// id); the nearest is admitted unconditionally; afterwards v is admitted
// iff IP(o,v) > IP(u,v) for every already admitted u. Stops at gamma.
std::vector<std::uint32_t> select_neighbors_mrng(
    std::uint32_t o, const std::vector<std::uint32_t>& candidates,
    const MultiModalDataset& data, const WeightVector& w, std::size_t gamma);

// Vertex with maximal joint IP to the per-modality mean vector; ties go
// to the lower id.
std::uint32_t select_seed(const MultiModalDataset& data,
                          const WeightVector& w);

// Makes every vertex reachable from the seed. While unreached vertices
// remain, adds one edge r->u maximizing joint IP over reached r and
// unreached u, then resumes BFS from u. Returns the sorted ids of
// vertices that received repair edges (their degree may exceed gamma).
std::vector<std::uint32_t> ensure_connectivity(
    std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t seed,
    const MultiModalDataset& data, const WeightVector& w);

// Full Algorithm: NN-Descent, candidate acquisition, MRNG selection, seed
// selection, connectivity repair.
FusedIndex build_fused_index(const MultiModalDataset& data,
                             const WeightVector& w, const BuildParams& params);

// Mean over vertices of |N(o) intersect exact-top-gamma(o)| / gamma,
// with exact lists computed by joint IP (self excluded).
double graph_quality(const ScoredGraph& graph, const MultiModalDataset& data,
                     const WeightVector& w, std::size_t gamma);
double graph_quality(const FusedIndex& index, const MultiModalDataset& data,
                     const WeightVector& w);

}  // namespace mstm

#endif  // MSTM_INDEX_HPP_
