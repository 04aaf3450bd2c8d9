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

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mstm/baselines.hpp"
#include "mstm/dataset.hpp"
#include "mstm/error.hpp"
#include "mstm/eval.hpp"
#include "mstm/index.hpp"
#include "mstm/io.hpp"
#include "mstm/log.hpp"
#include "mstm/search.hpp"
#include "mstm/synthetic.hpp"
#include "mstm/weights_learn.hpp"

namespace {

using json = nlohmann::json;

mstm::SyntheticSpec parse_synthetic_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mstm::FormatError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw mstm::FormatError(path + ": " + e.what());
  }
  mstm::SyntheticSpec spec;
  try {
    spec.name = j.value("name", spec.name);
    spec.count = j.value("count", spec.count);
    if (j.contains("dims"))
      spec.dims = j.at("dims").get<std::vector<std::size_t>>();
    spec.clusters = j.value("clusters", spec.clusters);
    spec.noise_scale = j.value("noise_scale", spec.noise_scale);
    spec.query_noise = j.value("query_noise", spec.query_noise);
    spec.noise_modality = j.value("noise_modality", spec.noise_modality);
    spec.queries = j.value("queries", spec.queries);
    spec.rng_seed = j.value("rng_seed", spec.rng_seed);
  } catch (const json::exception& e) {
    throw mstm::FormatError(path + ": " + e.what());
  }
  return spec;
}

std::vector<mstm::TrainingPair> load_training_pairs(
    const mstm::DatasetManifest& manifest, const mstm::MultiModalDataset& data,
    const std::string& positives_path) {
  std::string path = positives_path;
  if (path.empty()) {
    if (manifest.sources_file.empty())
      throw mstm::SetupError(
          "train-weights: no --positives given and manifest lists no "
          "sources_file");
    path = manifest.dir.empty() ? manifest.sources_file
                                : manifest.dir + "/" + manifest.sources_file;
  }
  auto rows = mstm::read_ivecs(path);
  auto queries = mstm::load_queries(manifest);
  if (rows.size() != queries.size())
    throw mstm::SetupError("train-weights: " + std::to_string(rows.size()) +
                           " positives for " + std::to_string(queries.size()) +
                           " queries");
  std::vector<mstm::TrainingPair> pairs;
  pairs.reserve(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (rows[q].empty() || rows[q][0] < 0 ||
        static_cast<std::size_t>(rows[q][0]) >= data.size())
      throw mstm::SetupError("train-weights: bad positive id for query " +
                             std::to_string(q));
    pairs.push_back({queries[q], static_cast<std::uint32_t>(rows[q][0])});
  }
  return pairs;
}

std::vector<std::vector<float>> load_compositions(
    const std::string& path, const mstm::MultiModalDataset& data,
    std::size_t n_queries) {
  auto vecs = mstm::read_fvecs(path);
  if (vecs.size() != n_queries)
    throw mstm::SetupError("composition file has " +
                           std::to_string(vecs.size()) + " vectors for " +
                           std::to_string(n_queries) + " queries");
  for (const auto& v : vecs)
    if (v.size() != data.dim(0))
      throw mstm::SetupError(
          "composition vectors must live in the modality-0 space");
  return vecs;
}

void write_search_csv(const std::string& path,
                      const std::vector<mstm::SearchOutcome>& outcomes) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw mstm::FormatError("cannot open " + path + " for writing");
  out << "query,rank,id,score\n" << std::setprecision(9);
  for (std::size_t q = 0; q < outcomes.size(); ++q)
    for (std::size_t r = 0; r < outcomes[q].ids.size(); ++r)
      out << q << "," << r + 1 << "," << outcomes[q].ids[r] << ","
          << outcomes[q].scores[r] << "\n";
  if (!out) throw mstm::FormatError("write failed for " + path);
}

int run(int argc, char** argv) {
  CLI::App app{"multimodal search of target modality over precomputed "
               "embeddings"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "rng seed shared by all subcommands");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->fallthrough();
  std::string gen_spec_path, gen_out_dir;
  gen->add_option("--spec", gen_spec_path, "synthetic spec json")
      ->required()
      ->check(CLI::ExistingFile);
  gen->add_option("--out", gen_out_dir, "output directory")->required();
  gen->callback([&]() {
    mstm::SyntheticSpec spec = parse_synthetic_spec(gen_spec_path);
    if (app.count("--seed") > 0) spec.rng_seed = seed;
    auto data = mstm::generate_synthetic(spec);
    std::string manifest = mstm::write_synthetic(gen_out_dir, spec, data);
    std::cout << "wrote " << manifest << " (n=" << spec.count
              << ", m=" << spec.dims.size() << ", queries=" << spec.queries
              << ")\n";
  });

  // gt
  auto* gt = app.add_subcommand("gt", "compute exact ground truth");
  gt->fallthrough();
  std::string gt_manifest, gt_weights, gt_out;
  std::size_t gt_k = 10;
  gt->add_option("--manifest", gt_manifest)->required()->check(CLI::ExistingFile);
  gt->add_option("--weights", gt_weights, "weights json defining the truth")
      ->required()
      ->check(CLI::ExistingFile);
  gt->add_option("--k", gt_k, "truth depth k'");
  gt->add_option("--out", gt_out, "output ivecs path")->required();
  gt->callback([&]() {
    auto manifest = mstm::read_manifest(gt_manifest);
    auto data = mstm::load_dataset(manifest);
    auto queries = mstm::load_queries(manifest);
    auto w = mstm::read_weights(gt_weights, data.modalities());
    auto truth = mstm::compute_ground_truth(data, queries, w, gt_k);
    truth.save(gt_out);
    std::cout << "wrote " << gt_out << " (" << truth.ids.size()
              << " queries, k'=" << truth.k << ")\n";
  });

  // train-weights
  auto* train = app.add_subcommand("train-weights",
                                   "learn modality weights contrastively");
  train->fallthrough();
  std::string tr_manifest, tr_positives, tr_out, tr_trajectory;
  mstm::TrainConfig tr_cfg;
  bool tr_random = false;
  train->add_option("--manifest", tr_manifest)
      ->required()
      ->check(CLI::ExistingFile);
  train->add_option("--positives", tr_positives,
                    "ivecs of positive ids, one per query (defaults to the "
                    "manifest sources file)");
  train->add_option("--out", tr_out, "output weights json")->required();
  train->add_option("--trajectory", tr_trajectory,
                    "optional loss/recall trajectory csv");
  train->add_option("--lr", tr_cfg.learning_rate, "learning rate");
  train->add_option("--iterations", tr_cfg.iterations);
  train->add_option("--negatives", tr_cfg.negatives, "|N-| per anchor");
  train->add_option("--minibatch", tr_cfg.minibatch);
  train->add_option("--remine-every", tr_cfg.remine_every);
  train->add_flag("--random-negatives", tr_random,
                  "draw negatives uniformly instead of mining");
  train->callback([&]() {
    auto manifest = mstm::read_manifest(tr_manifest);
    auto data = mstm::load_dataset(manifest);
    auto pairs = load_training_pairs(manifest, data, tr_positives);
    tr_cfg.rng_seed = seed;
    tr_cfg.mining = tr_random ? mstm::MiningStrategy::kRandom
                              : mstm::MiningStrategy::kHard;
    auto report = mstm::train_weights(pairs, data, tr_cfg);
    mstm::write_weights(tr_out, report.weights);
    if (!tr_trajectory.empty()) {
      std::ofstream out(tr_trajectory, std::ios::trunc);
      if (!out)
        throw mstm::FormatError("cannot open " + tr_trajectory +
                                " for writing");
      out << "iteration,loss,recall\n" << std::setprecision(10);
      for (std::size_t i = 0; i < report.loss.size(); ++i)
        out << i + 1 << "," << report.loss[i] << "," << report.recall[i]
            << "\n";
    }
    std::cout << "wrote " << tr_out << " (final loss "
              << std::setprecision(6) << report.loss.back() << ", recall "
              << report.recall.back() << ")\n";
  });

  // build
  auto* build = app.add_subcommand("build", "build the fused index");
  build->fallthrough();
  std::string b_manifest, b_weights, b_out;
  mstm::BuildParams b_params;
  build->add_option("--manifest", b_manifest)
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--weights", b_weights)->required()->check(CLI::ExistingFile);
  build->add_option("--out", b_out, "output index path")->required();
  build->add_option("--gamma", b_params.max_neighbors, "max neighbors");
  build->add_option("--epsilon", b_params.nn_descent_iters,
                    "nn-descent sweeps");
  build->add_option("--threads", b_params.threads);
  build->callback([&]() {
    auto manifest = mstm::read_manifest(b_manifest);
    auto data = mstm::load_dataset(manifest);
    auto w = mstm::read_weights(b_weights, data.modalities());
    b_params.rng_seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    auto index = mstm::build_fused_index(data, w, b_params);
    auto t1 = std::chrono::steady_clock::now();
    index.save(b_out);
    std::cout << "wrote " << b_out << " (n=" << index.size()
              << ", gamma=" << index.gamma << ", repairs="
              << index.repaired.size() << ", "
              << std::chrono::duration<double>(t1 - t0).count() << "s)\n";
  });

  // search
  auto* search = app.add_subcommand("search", "run joint queries");
  search->fallthrough();
  std::string s_manifest, s_index, s_weights, s_composition, s_out;
  mstm::SearchParams s_params;
  bool s_no_pruning = false;
  search->add_option("--manifest", s_manifest)
      ->required()
      ->check(CLI::ExistingFile);
  search->add_option("--index", s_index)->required()->check(CLI::ExistingFile);
  search->add_option("--weights", s_weights,
                     "weights json overriding the index weights")
      ->check(CLI::ExistingFile);
  search->add_option("--k", s_params.k);
  search->add_option("--l", s_params.l, "result pool size (0: 20*k)");
  search->add_flag("--no-pruning", s_no_pruning);
  search->add_flag("--seed-only-init", s_params.seed_only_init,
                   "start from the seed vertex only");
  search->add_flag("--fixed-scan-order", s_params.fixed_scan_order,
                   "scan modalities in index order");
  search->add_option("--composition", s_composition,
                     "fvecs replacing each query's modality-0 vector")
      ->check(CLI::ExistingFile);
  search->add_option("--out", s_out, "results csv")->required();
  search->callback([&]() {
    auto manifest = mstm::read_manifest(s_manifest);
    auto data = mstm::load_dataset(manifest);
    auto queries = mstm::load_queries(manifest);
    auto index = mstm::FusedIndex::load(s_index);
    if (index.weights.size() != data.modalities())
      throw mstm::UsageError(
          "search: index has " + std::to_string(index.weights.size()) +
          " modalities, dataset has " + std::to_string(data.modalities()));
    mstm::WeightVector w = s_weights.empty()
                               ? index.weight_vector()
                               : mstm::read_weights(s_weights,
                                                    data.modalities());
    if (!s_composition.empty()) {
      auto comps = load_compositions(s_composition, data, queries.size());
      for (std::size_t q = 0; q < queries.size(); ++q)
        queries[q].parts[0] = comps[q];
    }
    s_params.pruning = !s_no_pruning;
    s_params.rng_seed = seed;
    mstm::JointSearcher searcher(data, index);
    std::vector<mstm::SearchOutcome> outcomes;
    outcomes.reserve(queries.size());
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& q : queries)
      outcomes.push_back(searcher.search(q, w, s_params));
    auto t1 = std::chrono::steady_clock::now();
    write_search_csv(s_out, outcomes);
    double elapsed = std::chrono::duration<double>(t1 - t0).count();
    double visited = 0.0, pruned = 0.0;
    for (const auto& o : outcomes) {
      visited += static_cast<double>(o.visited);
      pruned += static_cast<double>(o.pruned_evals);
    }
    std::cout << "wrote " << s_out << " (" << outcomes.size() << " queries, "
              << std::setprecision(1) << std::fixed
              << static_cast<double>(outcomes.size()) / elapsed
              << " qps, mean visited " << visited / outcomes.size()
              << ", mean pruned " << pruned / outcomes.size() << ")\n";
  });

  // bench
  auto* bench = app.add_subcommand("bench", "recall/qps/sme sweeps");
  bench->fallthrough();
  std::string be_manifest, be_index, be_weights, be_truth, be_composition,
      be_out;
  std::vector<std::string> be_frameworks{"must"};
  mstm::BenchConfig be_cfg;
  bool be_no_pruning = false;
  bench->add_option("--manifest", be_manifest)
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--index", be_index, "fused index (required for must)")
      ->check(CLI::ExistingFile);
  bench->add_option("--weights", be_weights,
                    "weights json (defaults to the index weights)")
      ->check(CLI::ExistingFile);
  bench->add_option("--truth", be_truth, "ground truth ivecs")
      ->required()
      ->check(CLI::ExistingFile);
  bench->add_option("--frameworks,--framework", be_frameworks,
                    "must|mr|je|must-exact|mr-exact")
      ->delimiter(',');
  bench->add_option("--l-sweep", be_cfg.l_sweep)->delimiter(',');
  bench->add_option("--k", be_cfg.k);
  bench->add_option("--trials", be_cfg.trials);
  bench->add_option("--gamma", be_cfg.build.max_neighbors,
                    "gamma for baseline index builds");
  bench->add_option("--epsilon", be_cfg.build.nn_descent_iters);
  bench->add_option("--threads", be_cfg.build.threads);
  bench->add_flag("--no-pruning", be_no_pruning);
  bench->add_option("--composition", be_composition)
      ->check(CLI::ExistingFile);
  bench->add_option("--out", be_out, "output csv")->required();
  bench->callback([&]() {
    auto manifest = mstm::read_manifest(be_manifest);
    auto data = mstm::load_dataset(manifest);
    auto queries = mstm::load_queries(manifest);
    mstm::BenchInputs inputs;
    inputs.data = &data;
    inputs.queries = &queries;
    mstm::FusedIndex index;
    bool have_index = !be_index.empty();
    if (have_index) {
      index = mstm::FusedIndex::load(be_index);
      inputs.index = &index;
    }
    mstm::WeightVector w =
        !be_weights.empty()
            ? mstm::read_weights(be_weights, data.modalities())
            : (have_index ? index.weight_vector()
                          : mstm::WeightVector(std::vector<float>(
                                data.modalities(), 1.0f)));
    inputs.weights = &w;
    auto truth = mstm::GroundTruth::load(be_truth);
    inputs.truth = &truth;
    if (!be_composition.empty())
      inputs.compositions =
          load_compositions(be_composition, data, queries.size());
    be_cfg.frameworks.clear();
    for (const std::string& name : be_frameworks)
      be_cfg.frameworks.push_back(mstm::parse_framework(name));
    be_cfg.build.rng_seed = seed;
    be_cfg.search.rng_seed = seed;
    be_cfg.search.pruning = !be_no_pruning;
    auto rows = mstm::run_bench(inputs, be_cfg);
    mstm::write_bench_csv(be_out, rows);
    mstm::print_bench_table(std::cout, rows);
    std::cout << "wrote " << be_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const mstm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
