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

#ifndef MSTM_TYPES_HPP_
#define MSTM_TYPES_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mstm/error.hpp"

namespace mstm {

// Stored vector components and reported similarity scores are float;
// accumulation happens in double throughout the library.
using Score = float;

// Per-modality fusion weights. Stores raw weights w_i; the fused score
// uses w_i^2, exposed as squared(i). At least one weight must be
// positive, all weights must be finite and non-negative.
class WeightVector {
 public:
  explicit WeightVector(std::vector<float> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw UsageError("WeightVector: empty weight list");
    bool any_positive = false;
    for (float v : w_) {
      if (!std::isfinite(v)) throw UsageError("WeightVector: non-finite weight");
      if (v < 0.0f) throw UsageError("WeightVector: negative weight");
      if (v > 0.0f) any_positive = true;
    }
    if (!any_positive) throw UsageError("WeightVector: all weights are zero");
  }

  // Builds from squared weights, e.g. values read back from a weights file.
  static WeightVector from_squared(const std::vector<float>& squared) {
    std::vector<float> w;
    w.reserve(squared.size());
    for (float v : squared) {
      if (!std::isfinite(v) || v < 0.0f)
        throw UsageError("WeightVector: bad squared weight");
      w.push_back(std::sqrt(v));
    }
    return WeightVector(std::move(w));
  }

  std::size_t size() const { return w_.size(); }
  float weight(std::size_t i) const { return w_[i]; }

  // w_i^2 with the product taken in double.
  double squared(std::size_t i) const {
    return static_cast<double>(w_[i]) * static_cast<double>(w_[i]);
  }

  // Sum of squared weights. Squared norm of the fused object when every
  // modality vector is unit length and present.
  double norm_sq() const {
    double s = 0.0;
    for (std::size_t i = 0; i < w_.size(); ++i) s += squared(i);
    return s;
  }

  const std::vector<float>& raw() const { return w_; }

 private:
  std::vector<float> w_;
};

// A query with one optional vector per modality. An empty part means the
// modality is absent from the query and contributes zero to the score.
struct MultiModalQuery {
  std::vector<std::vector<float>> parts;

  bool present(std::size_t i) const {
    return i < parts.size() && !parts[i].empty();
  }
};

// Non-owning view of one object's modality vectors.
struct MultiVectorView {
  std::vector<std::span<const float>> parts;

  bool present(std::size_t i) const {
    return i < parts.size() && !parts[i].empty();
  }
};

}  // namespace mstm

#endif  // MSTM_TYPES_HPP_
