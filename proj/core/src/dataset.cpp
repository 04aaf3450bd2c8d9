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

#include "mstm/dataset.hpp"

#include <cstring>

#include "mstm/error.hpp"
#include "mstm/similarity.hpp"

namespace mstm {

MultiModalDataset::MultiModalDataset(std::size_t count,
                                     std::vector<std::size_t> dims)
    : count_(count), dims_(std::move(dims)) {
  if (dims_.empty()) throw UsageError("dataset: no modalities");
  for (std::size_t d : dims_)
    if (d == 0) throw UsageError("dataset: zero-dimensional modality");
  storage_.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i)
    storage_[i].resize(count_ * dims_[i], 0.0f);
}

std::span<float> MultiModalDataset::mutable_vec(std::size_t mod,
                                                std::size_t id) {
  if (mod >= dims_.size() || id >= count_)
    throw UsageError("dataset: vector index out of range");
  fingerprint_valid_ = false;
  return std::span<float>(storage_[mod].data() + id * dims_[mod], dims_[mod]);
}

std::span<const float> MultiModalDataset::vec(std::size_t mod,
                                              std::size_t id) const {
  if (mod >= dims_.size() || id >= count_)
    throw UsageError("dataset: vector index out of range");
  return std::span<const float>(storage_[mod].data() + id * dims_[mod],
                                dims_[mod]);
}

MultiVectorView MultiModalDataset::object(std::size_t id) const {
  MultiVectorView v;
  v.parts.reserve(dims_.size());
  for (std::size_t mod = 0; mod < dims_.size(); ++mod)
    v.parts.push_back(vec(mod, id));
  return v;
}

std::uint64_t MultiModalDataset::fingerprint() const {
  if (fingerprint_valid_) return fingerprint_;
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t bytes) {
    const unsigned char* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  };
  std::uint64_t n = count_;
  mix(&n, sizeof(n));
  for (std::size_t mod = 0; mod < dims_.size(); ++mod) {
    std::uint64_t d = dims_[mod];
    mix(&d, sizeof(d));
    mix(storage_[mod].data(), storage_[mod].size() * sizeof(float));
  }
  fingerprint_ = h;
  fingerprint_valid_ = true;
  return h;
}

MultiModalDataset MultiModalDataset::single_modality(
    const MultiModalDataset& src, std::size_t mod) {
  if (mod >= src.modalities())
    throw UsageError("single_modality: modality out of range");
  MultiModalDataset out(src.size(), {src.dim(mod)});
  std::memcpy(out.storage_[0].data(), src.storage_[mod].data(),
              src.storage_[mod].size() * sizeof(float));
  return out;
}

double joint_ip(const MultiModalDataset& data, std::size_t a, std::size_t b,
                const WeightVector& w) {
  if (w.size() != data.modalities())
    throw UsageError("joint_ip: weight count mismatch");
  double c = 0.0;
  double acc = 0.0;
  for (std::size_t mod = 0; mod < data.modalities(); ++mod) {
    double w2 = w.squared(mod);
    c += w2;
    acc += w2 * squared_l2(data.vec(mod, a), data.vec(mod, b));
  }
  return c - 0.5 * acc;
}

}  // namespace mstm
