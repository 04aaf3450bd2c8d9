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

#ifndef MSTM_EVAL_HPP_
#define MSTM_EVAL_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mstm/baselines.hpp"
#include "mstm/dataset.hpp"
#include "mstm/index.hpp"
#include "mstm/search.hpp"
#include "mstm/types.hpp"

namespace mstm {

// Exact top-k' ids per query under the truth-defining weights.
struct GroundTruth {
  std::size_t k = 0;
  std::vector<std::vector<std::uint32_t>> ids;

  void save(const std::string& path) const;
  static GroundTruth load(const std::string& path);
};

GroundTruth compute_ground_truth(const MultiModalDataset& data,
                                 const std::vector<MultiModalQuery>& queries,
                                 const WeightVector& w, std::size_t k_prime);

// |top-k results intersect truth| / k'.
double recall_at_k(const std::vector<std::uint32_t>& results,
                   const std::vector<std::uint32_t>& truth, std::size_t k);

// Mean over queries of 1 - IP between the modality-0 vectors of the true
// and returned top-1 objects.
double mean_sme(const std::vector<std::vector<std::uint32_t>>& results,
                const GroundTruth& truth, const MultiModalDataset& data);

enum class Framework { kMust, kMr, kJe, kMustExact, kMrExact };

Framework parse_framework(const std::string& name);
std::string framework_name(Framework f);

struct BenchConfig {
  std::vector<Framework> frameworks = {Framework::kMust};
  std::vector<std::size_t> l_sweep = {700, 1000, 1500, 2000, 4000};
  std::size_t k = 10;
  std::size_t trials = 3;
  BuildParams build;    // for lazily built baseline indexes
  SearchParams search;  // k and l overridden per row
};

struct BenchRow {
  Framework framework;
  std::size_t l = 0;  // 0 for exact frameworks
  double recall = 0.0;
  double sme = 0.0;
  double qps = 0.0;
  double mean_visited = 0.0;
  double mean_full = 0.0;
  double mean_pruned = 0.0;
  double mean_scans = 0.0;
};

struct BenchInputs {
  const MultiModalDataset* data = nullptr;
  const FusedIndex* index = nullptr;  // fused index for the must framework
  const WeightVector* weights = nullptr;
  const std::vector<MultiModalQuery>* queries = nullptr;
  const GroundTruth* truth = nullptr;
  // Optional composition vectors (one per query, modality-0 space); they
  // feed je and, when present, the modality-0 stream of mr.
  std::vector<std::vector<float>> compositions;
};

// Runs every requested framework over the l sweep: one untimed pass
// collects results and counters, then `trials` timed single-threaded
// passes are averaged into QPS. Baseline indexes (mr streams, je target)
// are built on demand with cfg.build.
std::vector<BenchRow> run_bench(const BenchInputs& in, const BenchConfig& cfg);

void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows);
void print_bench_table(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace mstm

#endif  // MSTM_EVAL_HPP_
