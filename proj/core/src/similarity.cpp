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

#include "mstm/similarity.hpp"

#include <algorithm>

#include "mstm/error.hpp"

namespace mstm {

double inner_product(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size())
    throw UsageError("inner_product: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

double squared_l2(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) throw UsageError("squared_l2: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

double joint_similarity(const MultiVectorView& a, const MultiVectorView& b,
                        const WeightVector& w) {
  std::size_t m = w.size();
  if (a.parts.size() > m || b.parts.size() > m)
    throw UsageError("joint_similarity: more modalities than weights");
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (!a.present(i) || !b.present(i)) continue;
    s += w.squared(i) * inner_product(a.parts[i], b.parts[i]);
  }
  return s;
}

double concat_norm_sq(const WeightVector& w) { return w.norm_sq(); }

double concat_norm_sq(const WeightVector& w, const std::vector<bool>& present) {
  if (present.size() != w.size())
    throw UsageError("concat_norm_sq: mask size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (present[i]) s += w.squared(i);
  return s;
}

double sme(std::span<const float> answer, std::span<const float> retrieved) {
  return 1.0 - inner_product(answer, retrieved);
}

}  // namespace mstm
