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

#include "mstm/synthetic.hpp"

#include <cmath>
#include <filesystem>
#include <random>

#include "mstm/error.hpp"
#include "mstm/io.hpp"

namespace mstm {
namespace {

std::vector<double> random_unit(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  double norm_sq = 0.0;
  do {
    norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      v[i] = gauss(rng);
      norm_sq += v[i] * v[i];
    }
  } while (norm_sq == 0.0);
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

// base + scale * gaussian, renormalized.
std::vector<double> perturb_unit(const std::vector<double>& base, double scale,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(base.size());
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    v[i] = base[i] + scale * gauss(rng);
    norm_sq += v[i] * v[i];
  }
  if (norm_sq == 0.0) return perturb_unit(base, scale, rng);
  double inv = 1.0 / std::sqrt(norm_sq);
  for (double& x : v) x *= inv;
  return v;
}

void store(std::span<float> dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = static_cast<float>(src[i]);
}

std::vector<float> to_float(const std::vector<double>& src) {
  std::vector<float> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    out[i] = static_cast<float>(src[i]);
  return out;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.count == 0) throw UsageError("synthetic: count must be positive");
  if (spec.clusters == 0 || spec.clusters > spec.count)
    throw UsageError("synthetic: clusters must be in [1, count]");
  if (spec.noise_modality >= static_cast<int>(spec.dims.size()))
    throw UsageError("synthetic: noise_modality out of range");
  std::mt19937_64 rng(spec.rng_seed);
  std::size_t m = spec.dims.size();
  double qn = spec.query_noise < 0.0 ? spec.noise_scale : spec.query_noise;

  // Cluster centers, one per modality per cluster.
  std::vector<std::vector<std::vector<double>>> centers(spec.clusters);
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    centers[c].resize(m);
    for (std::size_t mod = 0; mod < m; ++mod)
      centers[c][mod] = random_unit(spec.dims[mod], rng);
  }

  SyntheticData data{MultiModalDataset(spec.count, spec.dims), {}, {}, {}};
  data.labels.resize(spec.count);
  std::uniform_int_distribution<std::size_t> pick_cluster(0, spec.clusters - 1);
  for (std::size_t id = 0; id < spec.count; ++id) {
    std::size_t c = pick_cluster(rng);
    data.labels[id] = static_cast<std::uint32_t>(c);
    for (std::size_t mod = 0; mod < m; ++mod) {
      bool noise = static_cast<int>(mod) == spec.noise_modality;
      auto v = noise ? random_unit(spec.dims[mod], rng)
                     : perturb_unit(centers[c][mod], spec.noise_scale, rng);
      store(data.objects.mutable_vec(mod, id), v);
    }
  }

  data.queries.resize(spec.queries);
  data.sources.resize(spec.queries);
  std::uniform_int_distribution<std::size_t> pick_object(0, spec.count - 1);
  for (std::size_t q = 0; q < spec.queries; ++q) {
    std::size_t src = pick_object(rng);
    data.sources[q] = static_cast<std::uint32_t>(src);
    data.queries[q].parts.resize(m);
    for (std::size_t mod = 0; mod < m; ++mod) {
      if (static_cast<int>(mod) == spec.noise_modality) {
        data.queries[q].parts[mod] = to_float(random_unit(spec.dims[mod], rng));
        continue;
      }
      std::vector<double> base(spec.dims[mod]);
      auto stored = data.objects.vec(mod, src);
      for (std::size_t i = 0; i < base.size(); ++i) base[i] = stored[i];
      data.queries[q].parts[mod] = to_float(perturb_unit(base, qn, rng));
    }
  }
  return data;
}

std::string write_synthetic(const std::string& dir, const SyntheticSpec& spec,
                            const SyntheticData& data) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.name = spec.name;
  m.count = spec.count;
  m.dir = dir;
  std::size_t mods = spec.dims.size();
  for (std::size_t mod = 0; mod < mods; ++mod) {
    ModalityFile f;
    f.file = spec.name + "_base_" + std::to_string(mod) + ".fvecs";
    f.dim = spec.dims[mod];
    f.normalize = false;  // generated vectors are already unit length
    m.modalities.push_back(f);
    std::vector<std::vector<float>> vecs(spec.count);
    for (std::size_t id = 0; id < spec.count; ++id) {
      auto v = data.objects.vec(mod, id);
      vecs[id].assign(v.begin(), v.end());
    }
    write_fvecs((std::filesystem::path(dir) / f.file).string(), vecs);
  }
  for (std::size_t mod = 0; mod < mods; ++mod) {
    std::string qf = spec.name + "_query_" + std::to_string(mod) + ".fvecs";
    m.query_files.push_back(qf);
    std::vector<std::vector<float>> vecs(data.queries.size());
    for (std::size_t q = 0; q < data.queries.size(); ++q)
      vecs[q] = data.queries[q].parts[mod];
    write_fvecs((std::filesystem::path(dir) / qf).string(), vecs);
  }
  if (!data.sources.empty()) {
    m.sources_file = spec.name + "_sources.ivecs";
    std::vector<std::vector<std::int32_t>> rows(data.sources.size());
    for (std::size_t q = 0; q < data.sources.size(); ++q)
      rows[q] = {static_cast<std::int32_t>(data.sources[q])};
    write_ivecs((std::filesystem::path(dir) / m.sources_file).string(), rows);
  }
  std::string manifest_path =
      (std::filesystem::path(dir) / (spec.name + ".json")).string();
  write_manifest(manifest_path, m);
  return manifest_path;
}

}  // namespace mstm
