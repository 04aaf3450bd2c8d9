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

#ifndef MSTM_SYNTHETIC_HPP_
#define MSTM_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/types.hpp"

namespace mstm {

// Clustered multimodal data on the unit sphere. Objects are drawn around
// shared cluster centers, so modalities agree on cluster identity, except
// for a modality designated as noise, whose vectors are random units
// independent of the cluster label. Queries perturb a randomly chosen
// object (its source); for the noise modality the query part is a fresh
// random unit vector.
struct SyntheticSpec {
  std::size_t count = 1000;
  std::vector<std::size_t> dims = {16, 8};
  std::size_t clusters = 20;
  double noise_scale = 0.25;      // object perturbation around its center
  double query_noise = -1.0;      // query perturbation; -1 means noise_scale
  int noise_modality = -1;        // -1: every modality carries signal
  std::size_t queries = 100;
  std::uint64_t rng_seed = 1;
  std::string name = "synthetic";
};

struct SyntheticData {
  MultiModalDataset objects;
  std::vector<MultiModalQuery> queries;
  std::vector<std::uint32_t> sources;  // object each query was drawn from
  std::vector<std::uint32_t> labels;   // cluster of each object
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Writes base/query fvecs per modality, sources.ivecs, and a manifest
// (<name>.json) into `dir`. Returns the manifest path.
std::string write_synthetic(const std::string& dir, const SyntheticSpec& spec,
                            const SyntheticData& data);

}  // namespace mstm

#endif  // MSTM_SYNTHETIC_HPP_
