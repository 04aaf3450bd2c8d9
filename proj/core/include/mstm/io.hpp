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

#ifndef MSTM_IO_HPP_
#define MSTM_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/types.hpp"

namespace mstm {

// fvecs: per vector, a little-endian int32 dimension followed by that many
// float32 components. ivecs is the same layout with int32 components.
// Readers reject truncated records and inconsistent dimensions; the error
// message carries the byte offset of the bad record.
std::vector<std::vector<float>> read_fvecs(const std::string& path);
void write_fvecs(const std::string& path,
                 const std::vector<std::vector<float>>& vecs);

std::vector<std::vector<std::int32_t>> read_ivecs(const std::string& path);
void write_ivecs(const std::string& path,
                 const std::vector<std::vector<std::int32_t>>& vecs);

// One modality of a dataset manifest.
struct ModalityFile {
  std::string file;
  std::size_t dim = 0;
  bool normalize = false;
};

// JSON manifest describing a multimodal dataset on disk. `dir` is the
// directory the manifest was loaded from; relative paths resolve
// against it.
struct DatasetManifest {
  std::string name;
  std::size_t count = 0;
  std::vector<ModalityFile> modalities;
  std::vector<std::string> query_files;  // one per modality, "" if absent
  std::string truth_file;
  std::string sources_file;
  std::string dir;
};

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const DatasetManifest& m);

// Loads the base vectors of a manifest. Validates vector counts against
// the manifest, rejects NaN and Inf components, and for modalities marked
// normalize rejects zero-norm vectors and rescales to unit length in
// double precision.
MultiModalDataset load_dataset(const DatasetManifest& m);

// Loads query files listed in the manifest. Each query has one part per
// modality; a modality with an empty query_files entry is absent from
// every query.
std::vector<MultiModalQuery> load_queries(const DatasetManifest& m);

// Weights file: a JSON object mapping modality index to squared weight,
// e.g. {"0": 0.1199, "1": 0.5572}.
WeightVector read_weights(const std::string& path, std::size_t modalities);
void write_weights(const std::string& path, const WeightVector& w);

}  // namespace mstm

#endif  // MSTM_IO_HPP_
