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

#ifndef MSTM_DATASET_HPP_
#define MSTM_DATASET_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mstm/types.hpp"

namespace mstm {

// In-memory collection of n objects, each with one vector per modality.
// Modality 0 is the target modality. Storage is one contiguous float
// array per modality so vec(mod, id) is a cheap span.
class MultiModalDataset {
 public:
  // dims[i] is the dimensionality of modality i.
  MultiModalDataset(std::size_t count, std::vector<std::size_t> dims);

  std::size_t size() const { return count_; }
  std::size_t modalities() const { return dims_.size(); }
  std::size_t dim(std::size_t mod) const { return dims_.at(mod); }

  std::span<float> mutable_vec(std::size_t mod, std::size_t id);
  std::span<const float> vec(std::size_t mod, std::size_t id) const;

  // All modality vectors of one object.
  MultiVectorView object(std::size_t id) const;

  std::span<const float> modality_data(std::size_t mod) const {
    return storage_[mod];
  }

  // FNV-1a over all modality arrays in order. Computed once, then cached.
  // Used to tie a serialized index to the dataset it was built from.
  std::uint64_t fingerprint() const;

  // Wraps a single-modality dataset around an existing one's modality,
  // copying the vectors. Used by baselines that index one modality.
  static MultiModalDataset single_modality(const MultiModalDataset& src,
                                           std::size_t mod);

 private:
  std::size_t count_;
  std::vector<std::size_t> dims_;
  std::vector<std::vector<float>> storage_;
  mutable std::uint64_t fingerprint_ = 0;
  mutable bool fingerprint_valid_ = false;
};

// Fused inner product between two stored objects under weights w.
// Computed over the distance route of the generalized distance relation:
// C - 0.5 * sum_i w_i^2 * ||a_i - b_i||^2 with C = sum_i w_i^2. For unit
// vectors this equals the fused inner product. Double throughout.
double joint_ip(const MultiModalDataset& data, std::size_t a, std::size_t b,
                const WeightVector& w);

}  // namespace mstm

#endif  // MSTM_DATASET_HPP_
