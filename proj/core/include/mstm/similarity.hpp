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

#ifndef MSTM_SIMILARITY_HPP_
#define MSTM_SIMILARITY_HPP_

#include <span>

#include "mstm/types.hpp"

namespace mstm {

// Inner product of two equal-length vectors, accumulated in double.
double inner_product(std::span<const float> a, std::span<const float> b);

// Squared Euclidean distance, accumulated in double.
double squared_l2(std::span<const float> a, std::span<const float> b);

// Fused inner product: sum over modalities present in both
// views of w_i^2 * <a_i, b_i>. A modality missing on either side
// contributes zero.
double joint_similarity(const MultiVectorView& a, const MultiVectorView& b,
                        const WeightVector& w);

// Squared norm of the weighted concatenated vector assuming each present
// modality vector is unit length: sum of w_i^2 over present modalities.
// With no mask, all modalities count.
double concat_norm_sq(const WeightVector& w);
double concat_norm_sq(const WeightVector& w, const std::vector<bool>& present);

// Search metric error between the target-modality vectors of the answer
// object a and the retrieved object r: 1 - <a, r>. Zero when the search
// returns the exact answer; both vectors are assumed unit length.
double sme(std::span<const float> answer, std::span<const float> retrieved);

}  // namespace mstm

#endif  // MSTM_SIMILARITY_HPP_
