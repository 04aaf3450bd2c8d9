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

#include "mstm/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mstm/error.hpp"
#include "mstm/log.hpp"

namespace mstm {
namespace {

using json = nlohmann::json;

// Reads (dim, payload) records of `elem` bytes per component.
template <typename T>
std::vector<std::vector<T>> read_xvecs(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::vector<std::vector<T>> out;
  std::int64_t offset = 0;
  while (true) {
    std::int32_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (in.gcount() == 0 && in.eof()) break;
    if (in.gcount() != sizeof(dim))
      throw FormatError(path + ": truncated header at byte offset " +
                        std::to_string(offset));
    if (dim <= 0)
      throw FormatError(path + ": non-positive dimension " +
                        std::to_string(dim) + " at byte offset " +
                        std::to_string(offset));
    if (!out.empty() && static_cast<std::size_t>(dim) != out[0].size())
      throw FormatError(path + ": inconsistent dimension at byte offset " +
                        std::to_string(offset));
    std::vector<T> v(static_cast<std::size_t>(dim));
    in.read(reinterpret_cast<char*>(v.data()), dim * sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(dim * sizeof(T)))
      throw FormatError(path + ": truncated record at byte offset " +
                        std::to_string(offset));
    out.push_back(std::move(v));
    offset += sizeof(dim) + dim * sizeof(T);
  }
  return out;
}

template <typename T>
void write_xvecs(const std::string& path,
                 const std::vector<std::vector<T>>& vecs) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  for (const auto& v : vecs) {
    if (v.empty()) throw UsageError("write_xvecs: empty vector");
    std::int32_t dim = static_cast<std::int32_t>(v.size());
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(v.data()), dim * sizeof(T));
  }
  if (!out) throw FormatError("write failed for " + path);
}

std::string resolve(const std::string& dir, const std::string& file) {
  std::filesystem::path p(file);
  if (p.is_absolute() || dir.empty()) return file;
  return (std::filesystem::path(dir) / p).string();
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  return j;
}

}  // namespace

std::vector<std::vector<float>> read_fvecs(const std::string& path) {
  return read_xvecs<float>(path);
}

void write_fvecs(const std::string& path,
                 const std::vector<std::vector<float>>& vecs) {
  write_xvecs<float>(path, vecs);
}

std::vector<std::vector<std::int32_t>> read_ivecs(const std::string& path) {
  return read_xvecs<std::int32_t>(path);
}

void write_ivecs(const std::string& path,
                 const std::vector<std::vector<std::int32_t>>& vecs) {
  write_xvecs<std::int32_t>(path, vecs);
}

DatasetManifest read_manifest(const std::string& path) {
  json j = load_json(path);
  DatasetManifest m;
  try {
    m.name = j.at("name").get<std::string>();
    m.count = j.at("count").get<std::size_t>();
    for (const auto& mod : j.at("modalities")) {
      ModalityFile f;
      f.file = mod.at("file").get<std::string>();
      f.dim = mod.at("dim").get<std::size_t>();
      f.normalize = mod.value("normalize", false);
      m.modalities.push_back(std::move(f));
    }
    if (j.contains("query_files"))
      m.query_files = j.at("query_files").get<std::vector<std::string>>();
    m.truth_file = j.value("truth_file", "");
    m.sources_file = j.value("sources_file", "");
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  if (m.modalities.empty()) throw FormatError(path + ": no modalities");
  if (!m.query_files.empty() && m.query_files.size() != m.modalities.size())
    throw FormatError(path + ": query_files must list one entry per modality");
  m.dir = std::filesystem::path(path).parent_path().string();
  return m;
}

void write_manifest(const std::string& path, const DatasetManifest& m) {
  json j;
  j["name"] = m.name;
  j["count"] = m.count;
  j["modalities"] = json::array();
  for (const auto& f : m.modalities) {
    json mod;
    mod["file"] = f.file;
    mod["dim"] = f.dim;
    mod["normalize"] = f.normalize;
    j["modalities"].push_back(mod);
  }
  if (!m.query_files.empty()) j["query_files"] = m.query_files;
  if (!m.truth_file.empty()) j["truth_file"] = m.truth_file;
  if (!m.sources_file.empty()) j["sources_file"] = m.sources_file;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

namespace {

void validate_and_store(const std::vector<std::vector<float>>& raw,
                        const ModalityFile& f, std::size_t mod,
                        MultiModalDataset& data) {
  for (std::size_t id = 0; id < raw.size(); ++id) {
    const auto& v = raw[id];
    if (v.size() != f.dim)
      throw FormatError(f.file + ": vector " + std::to_string(id) + " has " +
                        std::to_string(v.size()) + " components, expected " +
                        std::to_string(f.dim));
    double norm_sq = 0.0;
    for (float x : v) {
      if (!std::isfinite(x))
        throw FormatError(f.file + ": non-finite component in vector " +
                          std::to_string(id));
      norm_sq += static_cast<double>(x) * static_cast<double>(x);
    }
    auto dst = data.mutable_vec(mod, id);
    if (f.normalize) {
      if (norm_sq == 0.0)
        throw FormatError(f.file + ": zero-norm vector " + std::to_string(id) +
                          " cannot be normalized");
      double inv = 1.0 / std::sqrt(norm_sq);
      for (std::size_t i = 0; i < v.size(); ++i)
        dst[i] = static_cast<float>(static_cast<double>(v[i]) * inv);
    } else {
      for (std::size_t i = 0; i < v.size(); ++i) dst[i] = v[i];
    }
  }
}

}  // namespace

MultiModalDataset load_dataset(const DatasetManifest& m) {
  std::vector<std::size_t> dims;
  dims.reserve(m.modalities.size());
  for (const auto& f : m.modalities) dims.push_back(f.dim);
  MultiModalDataset data(m.count, dims);
  for (std::size_t mod = 0; mod < m.modalities.size(); ++mod) {
    const auto& f = m.modalities[mod];
    auto raw = read_fvecs(resolve(m.dir, f.file));
    if (raw.size() != m.count)
      throw FormatError(f.file + ": has " + std::to_string(raw.size()) +
                        " vectors, manifest says " + std::to_string(m.count));
    validate_and_store(raw, f, mod, data);
  }
  MSTM_LOG_DEBUG("loaded dataset ", m.name, ": n=", m.count,
                 " m=", m.modalities.size());
  return data;
}

std::vector<MultiModalQuery> load_queries(const DatasetManifest& m) {
  if (m.query_files.empty())
    throw SetupError("manifest " + m.name + " lists no query files");
  std::size_t n_queries = 0;
  std::vector<std::vector<std::vector<float>>> per_mod(m.query_files.size());
  for (std::size_t mod = 0; mod < m.query_files.size(); ++mod) {
    if (m.query_files[mod].empty()) continue;
    per_mod[mod] = read_fvecs(resolve(m.dir, m.query_files[mod]));
    for (std::size_t q = 0; q < per_mod[mod].size(); ++q) {
      const auto& v = per_mod[mod][q];
      if (v.size() != m.modalities[mod].dim)
        throw FormatError(m.query_files[mod] + ": query " + std::to_string(q) +
                          " dimension mismatch");
      for (float x : v)
        if (!std::isfinite(x))
          throw FormatError(m.query_files[mod] + ": non-finite component");
    }
    if (n_queries == 0)
      n_queries = per_mod[mod].size();
    else if (per_mod[mod].size() != n_queries)
      throw FormatError("query files disagree on query count");
  }
  if (n_queries == 0) throw SetupError("no query vectors found");
  std::vector<MultiModalQuery> out(n_queries);
  for (std::size_t q = 0; q < n_queries; ++q) {
    out[q].parts.resize(m.query_files.size());
    for (std::size_t mod = 0; mod < m.query_files.size(); ++mod)
      if (!per_mod[mod].empty()) out[q].parts[mod] = per_mod[mod][q];
  }
  return out;
}

WeightVector read_weights(const std::string& path, std::size_t modalities) {
  json j = load_json(path);
  if (!j.is_object()) throw FormatError(path + ": expected a JSON object");
  std::vector<float> squared(modalities, 0.0f);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::size_t idx = 0;
    try {
      idx = static_cast<std::size_t>(std::stoul(it.key()));
    } catch (const std::exception&) {
      throw FormatError(path + ": non-numeric modality key '" + it.key() + "'");
    }
    if (idx >= modalities)
      throw FormatError(path + ": modality index " + it.key() +
                        " out of range for " + std::to_string(modalities) +
                        " modalities");
    if (!it.value().is_number())
      throw FormatError(path + ": weight for modality " + it.key() +
                        " is not a number");
    squared[idx] = it.value().get<float>();
  }
  return WeightVector::from_squared(squared);
}

void write_weights(const std::string& path, const WeightVector& w) {
  json j = json::object();
  for (std::size_t i = 0; i < w.size(); ++i)
    j[std::to_string(i)] = w.squared(i);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace mstm
