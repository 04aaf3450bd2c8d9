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

#include "mstm/index.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>
#include <random>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mstm/error.hpp"
#include "mstm/log.hpp"
#include "mstm/similarity.hpp"

namespace mstm {
namespace {

constexpr std::uint32_t kIndexMagic = 0x58494446u;  // "FDIX" little-endian
constexpr std::uint32_t kIndexVersion = 1;

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

std::size_t argmin_ip(const std::vector<Neighbor>& list) {
  std::size_t z = 0;
  for (std::size_t i = 1; i < list.size(); ++i)
    if (list[i].ip < list[z].ip) z = i;
  return z;
}

bool contains_id(const std::vector<Neighbor>& list, std::uint32_t id) {
  for (const Neighbor& nb : list)
    if (nb.id == id) return true;
  return false;
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (in.gcount() != sizeof(T)) throw FormatError(path + ": truncated index");
  return v;
}

}  // namespace

ScoredGraph init_random_graph(const MultiModalDataset& data,
                              const WeightVector& w,
                              const BuildParams& params) {
  std::size_t n = data.size();
  if (n < 2) throw BuildError("init_nndescent: need at least 2 objects");
  if (params.max_neighbors < 1)
    throw UsageError("init_nndescent: max_neighbors must be >= 1");
  std::size_t degree = std::min(params.max_neighbors, n - 1);
  std::mt19937_64 rng(params.rng_seed);
  ScoredGraph graph(n);
  std::uniform_int_distribution<std::uint32_t> pick(
      0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t o = 0; o < n; ++o) {
    auto& list = graph[o];
    list.reserve(degree);
    if (degree == n - 1) {
      for (std::size_t v = 0; v < n; ++v)
        if (v != o) list.push_back({static_cast<std::uint32_t>(v), 0.0f});
    } else {
      std::unordered_set<std::uint32_t> seen;
      seen.reserve(degree * 2);
      while (list.size() < degree) {
        std::uint32_t v = pick(rng);
        if (v == o || !seen.insert(v).second) continue;
        list.push_back({v, 0.0f});
      }
    }
    for (Neighbor& nb : list)
      nb.ip = static_cast<float>(joint_ip(data, o, nb.id, w));
  }
  return graph;
}

void nn_descent_sweep(ScoredGraph& graph, const MultiModalDataset& data,
                      const WeightVector& w, int threads) {
  const ScoredGraph snapshot = graph;
  std::int64_t n = static_cast<std::int64_t>(graph.size());
  int nthreads = resolve_threads(threads);
  (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
  for (std::int64_t oi = 0; oi < n; ++oi) {
    std::uint32_t o = static_cast<std::uint32_t>(oi);
    auto& list = graph[o];
    if (list.empty()) continue;
    for (const Neighbor& v : snapshot[o]) {
      for (const Neighbor& u : snapshot[v.id]) {
        if (u.id == o) continue;
        if (contains_id(list, u.id)) continue;
        float ip = static_cast<float>(joint_ip(data, o, u.id, w));
        std::size_t z = argmin_ip(list);
        if (ip > list[z].ip) list[z] = {u.id, ip};
      }
    }
  }
}

ScoredGraph init_nndescent(const MultiModalDataset& data,
                           const WeightVector& w, const BuildParams& params) {
  if (params.nn_descent_iters < 1)
    throw UsageError("init_nndescent: nn_descent_iters must be >= 1");
  ScoredGraph graph = init_random_graph(data, w, params);
  for (std::size_t sweep = 0; sweep < params.nn_descent_iters; ++sweep) {
    nn_descent_sweep(graph, data, w, params.threads);
    MSTM_LOG_DEBUG("nn-descent sweep ", sweep + 1, "/",
                   params.nn_descent_iters, " done");
  }
  return graph;
}

std::vector<std::uint32_t> acquire_candidates(const ScoredGraph& graph,
                                              std::uint32_t o) {
  if (o >= graph.size()) throw UsageError("acquire_candidates: bad vertex id");
  std::vector<std::uint32_t> out;
  out.reserve(graph[o].size() * (graph[o].size() + 1));
  for (const Neighbor& v : graph[o]) {
    out.push_back(v.id);
    for (const Neighbor& u : graph[v.id]) out.push_back(u.id);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.erase(std::remove(out.begin(), out.end(), o), out.end());
  return out;
}

std::vector<std::uint32_t> select_neighbors_mrng(
    std::uint32_t o, const std::vector<std::uint32_t>& candidates,
    const MultiModalDataset& data, const WeightVector& w, std::size_t gamma) {
  struct Scored {
    double ip;
    std::uint32_t id;
  };
  std::vector<Scored> scored;
  scored.reserve(candidates.size());
  for (std::uint32_t c : candidates) scored.push_back({joint_ip(data, o, c, w), c});
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.ip != b.ip) return a.ip > b.ip;
    return a.id < b.id;
  });
  std::vector<std::uint32_t> result;
  for (const Scored& cand : scored) {
    if (result.size() >= gamma) break;
    bool admit = true;
    for (std::uint32_t u : result) {
      if (joint_ip(data, u, cand.id, w) >= cand.ip) {
        admit = false;
        break;
      }
    }
    if (admit) result.push_back(cand.id);
  }
  return result;
}

std::uint32_t select_seed(const MultiModalDataset& data,
                          const WeightVector& w) {
  std::size_t n = data.size();
  if (n == 0) throw UsageError("select_seed: empty dataset");
  std::size_t m = data.modalities();
  std::vector<std::vector<double>> centroid(m);
  for (std::size_t mod = 0; mod < m; ++mod) {
    centroid[mod].assign(data.dim(mod), 0.0);
    for (std::size_t id = 0; id < n; ++id) {
      auto v = data.vec(mod, id);
      for (std::size_t i = 0; i < v.size(); ++i) centroid[mod][i] += v[i];
    }
    for (double& x : centroid[mod]) x /= static_cast<double>(n);
  }
  std::uint32_t best = 0;
  double best_ip = 0.0;
  for (std::size_t id = 0; id < n; ++id) {
    double ip = 0.0;
    for (std::size_t mod = 0; mod < m; ++mod) {
      auto v = data.vec(mod, id);
      double dot = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) dot += centroid[mod][i] * v[i];
      ip += w.squared(mod) * dot;
    }
    if (id == 0 || ip > best_ip) {
      best = static_cast<std::uint32_t>(id);
      best_ip = ip;
    }
  }
  return best;
}

namespace {

// Marks everything reachable from `start` over directed edges.
void bfs_mark(const std::vector<std::vector<std::uint32_t>>& adj,
              std::uint32_t start, std::vector<char>& reached) {
  if (reached[start]) return;
  std::deque<std::uint32_t> queue{start};
  reached[start] = 1;
  while (!queue.empty()) {
    std::uint32_t v = queue.front();
    queue.pop_front();
    for (std::uint32_t u : adj[v]) {
      if (!reached[u]) {
        reached[u] = 1;
        queue.push_back(u);
      }
    }
  }
}

}  // namespace

std::vector<std::uint32_t> ensure_connectivity(
    std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t seed,
    const MultiModalDataset& data, const WeightVector& w) {
  std::size_t n = adj.size();
  if (n == 0) return {};
  if (seed >= n) throw UsageError("ensure_connectivity: bad seed");
  std::vector<char> reached(n, 0);
  bfs_mark(adj, seed, reached);
  std::vector<std::uint32_t> repaired;
  while (true) {
    std::vector<std::uint32_t> unreached;
    std::vector<std::uint32_t> reached_ids;
    for (std::size_t v = 0; v < n; ++v)
      (reached[v] ? reached_ids : unreached)
          .push_back(static_cast<std::uint32_t>(v));
    if (unreached.empty()) break;
    std::uint32_t best_u = unreached[0];
    std::uint32_t best_r = reached_ids[0];
    double best_ip = 0.0;
    bool first = true;
    for (std::uint32_t u : unreached) {
      for (std::uint32_t r : reached_ids) {
        double ip = joint_ip(data, r, u, w);
        if (first || ip > best_ip) {
          best_ip = ip;
          best_u = u;
          best_r = r;
          first = false;
        }
      }
    }
    adj[best_r].push_back(best_u);
    repaired.push_back(best_r);
    MSTM_LOG_DEBUG("connectivity repair: ", best_r, " -> ", best_u);
    bfs_mark(adj, best_u, reached);
  }
  std::sort(repaired.begin(), repaired.end());
  repaired.erase(std::unique(repaired.begin(), repaired.end()),
                 repaired.end());
  return repaired;
}

FusedIndex build_fused_index(const MultiModalDataset& data,
                             const WeightVector& w,
                             const BuildParams& params) {
  if (w.size() != data.modalities())
    throw UsageError("build_fused_index: weight count mismatch");
  ScoredGraph knn = init_nndescent(data, w, params);
  std::size_t n = data.size();
  FusedIndex index;
  index.adj.resize(n);
  index.gamma = static_cast<std::uint32_t>(params.max_neighbors);
  index.weights = w.raw();
  index.params = params;
  int nthreads = resolve_threads(params.threads);
  (void)nthreads;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) num_threads(nthreads)
#endif
  for (std::int64_t o = 0; o < static_cast<std::int64_t>(n); ++o) {
    auto candidates = acquire_candidates(knn, static_cast<std::uint32_t>(o));
    index.adj[o] = select_neighbors_mrng(static_cast<std::uint32_t>(o),
                                         candidates, data, w,
                                         params.max_neighbors);
  }
  index.seed = select_seed(data, w);
  index.repaired = ensure_connectivity(index.adj, index.seed, data, w);
  index.fingerprint = data.fingerprint();
  MSTM_LOG_INFO("built fused index: n=", n, " gamma=", index.gamma,
                " seed=", index.seed, " repairs=", index.repaired.size());
  return index;
}

void FusedIndex::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  write_pod(out, kIndexMagic);
  write_pod(out, kIndexVersion);
  write_pod(out, static_cast<std::uint32_t>(adj.size()));
  write_pod(out, static_cast<std::uint32_t>(weights.size()));
  write_pod(out, gamma);
  std::uint32_t flags = repaired.empty() ? 0u : 1u;
  write_pod(out, flags);
  for (float wv : weights) write_pod(out, wv);
  write_pod(out, seed);
  for (const auto& list : adj) {
    write_pod(out, static_cast<std::uint32_t>(list.size()));
    if (!list.empty())
      out.write(reinterpret_cast<const char*>(list.data()),
                list.size() * sizeof(std::uint32_t));
  }
  if (flags & 1u) {
    write_pod(out, static_cast<std::uint32_t>(repaired.size()));
    out.write(reinterpret_cast<const char*>(repaired.data()),
              repaired.size() * sizeof(std::uint32_t));
  }
  write_pod(out, fingerprint);
  if (!out) throw FormatError("write failed for " + path);
}

FusedIndex FusedIndex::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  if (read_pod<std::uint32_t>(in, path) != kIndexMagic)
    throw FormatError(path + ": not a fused index file");
  if (read_pod<std::uint32_t>(in, path) != kIndexVersion)
    throw FormatError(path + ": unsupported index version");
  std::uint32_t n = read_pod<std::uint32_t>(in, path);
  std::uint32_t m = read_pod<std::uint32_t>(in, path);
  FusedIndex index;
  index.gamma = read_pod<std::uint32_t>(in, path);
  std::uint32_t flags = read_pod<std::uint32_t>(in, path);
  index.weights.resize(m);
  for (std::uint32_t i = 0; i < m; ++i)
    index.weights[i] = read_pod<float>(in, path);
  index.seed = read_pod<std::uint32_t>(in, path);
  if (n > 0 && index.seed >= n) throw FormatError(path + ": seed out of range");
  index.adj.resize(n);
  for (std::uint32_t o = 0; o < n; ++o) {
    std::uint32_t count = read_pod<std::uint32_t>(in, path);
    index.adj[o].resize(count);
    if (count > 0) {
      in.read(reinterpret_cast<char*>(index.adj[o].data()),
              count * sizeof(std::uint32_t));
      if (in.gcount() !=
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)))
        throw FormatError(path + ": truncated adjacency");
    }
    for (std::uint32_t id : index.adj[o])
      if (id >= n) throw FormatError(path + ": neighbor id out of range");
  }
  if (flags & 1u) {
    std::uint32_t count = read_pod<std::uint32_t>(in, path);
    index.repaired.resize(count);
    in.read(reinterpret_cast<char*>(index.repaired.data()),
            count * sizeof(std::uint32_t));
    if (in.gcount() !=
        static_cast<std::streamsize>(count * sizeof(std::uint32_t)))
      throw FormatError(path + ": truncated repair list");
  }
  index.fingerprint = read_pod<std::uint64_t>(in, path);
  index.params.max_neighbors = index.gamma;
  index.params.nn_descent_iters = 0;
  index.params.rng_seed = 0;
  return index;
}

namespace {

std::vector<std::uint32_t> exact_top_gamma(const MultiModalDataset& data,
                                           const WeightVector& w,
                                           std::uint32_t o,
                                           std::size_t gamma) {
  struct Scored {
    double ip;
    std::uint32_t id;
  };
  std::vector<Scored> scored;
  scored.reserve(data.size() - 1);
  for (std::size_t v = 0; v < data.size(); ++v) {
    if (v == o) continue;
    scored.push_back({joint_ip(data, o, v, w), static_cast<std::uint32_t>(v)});
  }
  std::size_t take = std::min(gamma, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.ip != b.ip) return a.ip > b.ip;
                      return a.id < b.id;
                    });
  std::vector<std::uint32_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].id);
  return out;
}

template <typename GetIds>
double quality_impl(std::size_t n, const MultiModalDataset& data,
                    const WeightVector& w, std::size_t gamma, GetIds get_ids) {
  if (n == 0 || gamma == 0) return 0.0;
  double total = 0.0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : total)
#endif
  for (std::int64_t o = 0; o < static_cast<std::int64_t>(n); ++o) {
    auto truth = exact_top_gamma(data, w, static_cast<std::uint32_t>(o), gamma);
    std::unordered_set<std::uint32_t> truth_set(truth.begin(), truth.end());
    std::size_t hits = 0;
    for (std::uint32_t id : get_ids(static_cast<std::uint32_t>(o)))
      if (truth_set.count(id)) ++hits;
    total += static_cast<double>(hits) / static_cast<double>(gamma);
  }
  return total / static_cast<double>(n);
}

}  // namespace

double graph_quality(const ScoredGraph& graph, const MultiModalDataset& data,
                     const WeightVector& w, std::size_t gamma) {
  return quality_impl(graph.size(), data, w, gamma, [&](std::uint32_t o) {
    std::vector<std::uint32_t> ids;
    ids.reserve(graph[o].size());
    for (const Neighbor& nb : graph[o]) ids.push_back(nb.id);
    return ids;
  });
}

double graph_quality(const FusedIndex& index, const MultiModalDataset& data,
                     const WeightVector& w) {
  return quality_impl(index.adj.size(), data, w, index.gamma,
                      [&](std::uint32_t o) { return index.adj[o]; });
}

}  // namespace mstm
