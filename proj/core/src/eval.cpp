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

#include "mstm/eval.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <unordered_set>

#include "mstm/error.hpp"
#include "mstm/io.hpp"
#include "mstm/log.hpp"
#include "mstm/similarity.hpp"

namespace mstm {

void GroundTruth::save(const std::string& path) const {
  std::vector<std::vector<std::int32_t>> rows(ids.size());
  for (std::size_t q = 0; q < ids.size(); ++q)
    rows[q].assign(ids[q].begin(), ids[q].end());
  write_ivecs(path, rows);
}

GroundTruth GroundTruth::load(const std::string& path) {
  auto rows = read_ivecs(path);
  GroundTruth truth;
  if (rows.empty()) throw FormatError(path + ": empty ground truth");
  truth.k = rows[0].size();
  truth.ids.resize(rows.size());
  for (std::size_t q = 0; q < rows.size(); ++q) {
    for (std::int32_t id : rows[q]) {
      if (id < 0) throw FormatError(path + ": negative object id");
      truth.ids[q].push_back(static_cast<std::uint32_t>(id));
    }
  }
  return truth;
}

GroundTruth compute_ground_truth(const MultiModalDataset& data,
                                 const std::vector<MultiModalQuery>& queries,
                                 const WeightVector& w, std::size_t k_prime) {
  if (queries.empty()) throw UsageError("compute_ground_truth: no queries");
  GroundTruth truth;
  truth.k = k_prime;
  truth.ids.resize(queries.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
#endif
  for (std::int64_t q = 0; q < static_cast<std::int64_t>(queries.size()); ++q) {
    auto top = brute_force_topk(data, queries[q], w, k_prime);
    truth.ids[q].reserve(top.size());
    for (const Neighbor& nb : top) truth.ids[q].push_back(nb.id);
  }
  return truth;
}

double recall_at_k(const std::vector<std::uint32_t>& results,
                   const std::vector<std::uint32_t>& truth, std::size_t k) {
  if (truth.empty()) throw UsageError("recall_at_k: empty truth entry");
  std::unordered_set<std::uint32_t> truth_set(truth.begin(), truth.end());
  std::size_t top = std::min(k, results.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < top; ++i)
    if (truth_set.count(results[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double mean_sme(const std::vector<std::vector<std::uint32_t>>& results,
                const GroundTruth& truth, const MultiModalDataset& data) {
  if (results.size() != truth.ids.size())
    throw UsageError("mean_sme: result/truth count mismatch");
  if (results.empty()) throw UsageError("mean_sme: no queries");
  double total = 0.0;
  for (std::size_t q = 0; q < results.size(); ++q) {
    if (results[q].empty() || truth.ids[q].empty())
      throw UsageError("mean_sme: empty result or truth row");
    total += sme(data.vec(0, truth.ids[q][0]), data.vec(0, results[q][0]));
  }
  return total / static_cast<double>(results.size());
}

Framework parse_framework(const std::string& name) {
  if (name == "must") return Framework::kMust;
  if (name == "mr") return Framework::kMr;
  if (name == "je") return Framework::kJe;
  if (name == "must-exact") return Framework::kMustExact;
  if (name == "mr-exact") return Framework::kMrExact;
  throw SetupError("unknown framework '" + name +
                   "' (expected must|mr|je|must-exact|mr-exact)");
}

std::string framework_name(Framework f) {
  switch (f) {
    case Framework::kMust:
      return "must";
    case Framework::kMr:
      return "mr";
    case Framework::kJe:
      return "je";
    case Framework::kMustExact:
      return "must-exact";
    case Framework::kMrExact:
      return "mr-exact";
  }
  return "?";
}

namespace {

struct PassStats {
  std::vector<std::vector<std::uint32_t>> results;
  std::uint64_t visited = 0;
  std::uint64_t full = 0;
  std::uint64_t pruned = 0;
  std::uint64_t scans = 0;
};

// Everything a framework needs at query time, built once per framework.
struct FrameworkRunner {
  Framework framework;
  const BenchInputs* in;
  const BenchConfig* cfg;
  // je artifacts
  std::unique_ptr<MultiModalDataset> je_data;
  std::unique_ptr<FusedIndex> je_index;
  // mr artifacts
  std::unique_ptr<MrIndexSet> mr_set;

  std::span<const float> composition(std::size_t q) const {
    if (in->compositions.empty()) return {};
    return in->compositions[q];
  }

  void run_query(std::size_t q, std::size_t l, PassStats* stats) const {
    const auto& query = (*in->queries)[q];
    SearchParams sp = cfg->search;
    sp.k = cfg->k;
    sp.l = l;
    switch (framework) {
      case Framework::kMust: {
        SearchOutcome so =
            joint_search(*in->data, *in->index, query, *in->weights, sp);
        if (stats) {
          stats->results.push_back(std::move(so.ids));
          stats->visited += so.visited;
          stats->full += so.full_evals;
          stats->pruned += so.pruned_evals;
          stats->scans += so.modality_scans;
        }
        break;
      }
      case Framework::kMustExact: {
        auto top = brute_force_topk(*in->data, query, *in->weights, cfg->k);
        if (stats) {
          std::vector<std::uint32_t> ids;
          ids.reserve(top.size());
          for (const Neighbor& nb : top) ids.push_back(nb.id);
          stats->results.push_back(std::move(ids));
          stats->full += in->data->size();
        }
        break;
      }
      case Framework::kJe: {
        SearchOutcome so =
            je_search(*je_data, *je_index, composition(q), sp);
        if (stats) {
          stats->results.push_back(std::move(so.ids));
          stats->visited += so.visited;
          stats->full += so.full_evals;
          stats->pruned += so.pruned_evals;
          stats->scans += so.modality_scans;
        }
        break;
      }
      case Framework::kMr:
      case Framework::kMrExact: {
        MergePolicy policy{cfg->k, cfg->k};
        static const MrIndexSet kNoIndexes{};
        const MrIndexSet& set = mr_set ? *mr_set : kNoIndexes;
        MrOutcome mo = mr_search(*in->data, set, query, policy, sp,
                                 composition(q),
                                 framework == Framework::kMrExact);
        if (stats) {
          stats->results.push_back(std::move(mo.ids));
          stats->visited += mo.visited;
          stats->full += mo.full_evals;
          stats->pruned += mo.pruned_evals;
          stats->scans += mo.modality_scans;
        }
        break;
      }
    }
  }
};

FrameworkRunner make_runner(Framework f, const BenchInputs& in,
                            const BenchConfig& cfg) {
  FrameworkRunner runner{f, &in, &cfg, nullptr, nullptr, nullptr};
  if (f == Framework::kMust && in.index == nullptr)
    throw SetupError("bench: must framework requires a fused index");
  if (f == Framework::kJe) {
    if (in.compositions.empty())
      throw SetupError("bench: je framework requires composition vectors");
    runner.je_data = std::make_unique<MultiModalDataset>(
        MultiModalDataset::single_modality(*in.data, 0));
    MSTM_LOG_INFO("building je target index");
    runner.je_index = std::make_unique<FusedIndex>(build_fused_index(
        *runner.je_data, WeightVector({1.0f}), cfg.build));
  }
  if (f == Framework::kMr)
    runner.mr_set =
        std::make_unique<MrIndexSet>(build_mr_indexes(*in.data, cfg.build));
  if (!in.compositions.empty() &&
      in.compositions.size() != in.queries->size())
    throw SetupError("bench: composition count does not match query count");
  return runner;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchInputs& in, const BenchConfig& cfg) {
  if (in.data == nullptr || in.queries == nullptr || in.truth == nullptr ||
      in.weights == nullptr)
    throw SetupError("bench: data, queries, truth and weights are required");
  if (in.queries->empty()) throw SetupError("bench: no queries");
  if (in.truth->ids.size() != in.queries->size())
    throw SetupError("bench: truth has " + std::to_string(in.truth->ids.size()) +
                     " entries for " + std::to_string(in.queries->size()) +
                     " queries");
  if (cfg.frameworks.empty()) throw SetupError("bench: no frameworks selected");
  if (cfg.l_sweep.empty()) throw SetupError("bench: empty l sweep");
  if (cfg.trials < 1) throw SetupError("bench: trials must be >= 1");

  std::size_t nq = in.queries->size();
  std::vector<BenchRow> rows;
  for (Framework f : cfg.frameworks) {
    FrameworkRunner runner = make_runner(f, in, cfg);
    bool exact = f == Framework::kMustExact || f == Framework::kMrExact;
    std::vector<std::size_t> sweep = exact ? std::vector<std::size_t>{0}
                                           : cfg.l_sweep;
    for (std::size_t l : sweep) {
      PassStats stats;
      stats.results.reserve(nq);
      for (std::size_t q = 0; q < nq; ++q) runner.run_query(q, l, &stats);

      double elapsed_total = 0.0;
      for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        auto t0 = std::chrono::steady_clock::now();
        for (std::size_t q = 0; q < nq; ++q) runner.run_query(q, l, nullptr);
        auto t1 = std::chrono::steady_clock::now();
        elapsed_total += std::chrono::duration<double>(t1 - t0).count();
      }
      double mean_elapsed = elapsed_total / static_cast<double>(cfg.trials);

      BenchRow row;
      row.framework = f;
      row.l = l;
      double recall_total = 0.0;
      for (std::size_t q = 0; q < nq; ++q)
        recall_total +=
            recall_at_k(stats.results[q], in.truth->ids[q], cfg.k);
      row.recall = recall_total / static_cast<double>(nq);
      row.sme = mean_sme(stats.results, *in.truth, *in.data);
      row.qps = static_cast<double>(nq) / mean_elapsed;
      row.mean_visited = static_cast<double>(stats.visited) / nq;
      row.mean_full = static_cast<double>(stats.full) / nq;
      row.mean_pruned = static_cast<double>(stats.pruned) / nq;
      row.mean_scans = static_cast<double>(stats.scans) / nq;
      rows.push_back(row);
      MSTM_LOG_INFO("bench ", framework_name(f), " l=", l,
                    " recall=", row.recall, " qps=", row.qps);
    }
  }
  return rows;
}

void write_bench_csv(const std::string& path,
                     const std::vector<BenchRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << "framework,l,recall,sme,qps,mean_visited,mean_full,mean_pruned,"
         "mean_scans\n";
  for (const BenchRow& row : rows) {
    out << framework_name(row.framework) << "," << row.l << ","
        << std::setprecision(6) << std::fixed << row.recall << "," << row.sme
        << "," << std::setprecision(1) << row.qps << ","
        << std::setprecision(2) << row.mean_visited << "," << row.mean_full
        << "," << row.mean_pruned << "," << row.mean_scans << "\n";
    out.unsetf(std::ios::fixed);
    out << std::setprecision(6);
  }
  if (!out) throw FormatError("write failed for " + path);
}

void print_bench_table(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << std::left << std::setw(12) << "framework" << std::right
     << std::setw(7) << "l" << std::setw(9) << "recall" << std::setw(10)
     << "sme" << std::setw(12) << "qps" << std::setw(12) << "visited"
     << std::setw(12) << "full" << std::setw(12) << "pruned" << std::setw(12)
     << "scans" << "\n";
  for (const BenchRow& row : rows) {
    os << std::left << std::setw(12) << framework_name(row.framework)
       << std::right << std::setw(7) << row.l << std::fixed
       << std::setprecision(4) << std::setw(9) << row.recall << std::setw(10)
       << row.sme << std::setprecision(1) << std::setw(12) << row.qps
       << std::setw(12) << row.mean_visited << std::setw(12) << row.mean_full
       << std::setw(12) << row.mean_pruned << std::setw(12) << row.mean_scans
       << "\n";
    os.unsetf(std::ios::fixed);
    os << std::setprecision(6);
  }
}

}  // namespace mstm
