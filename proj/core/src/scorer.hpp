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

// Internal header, not installed. The incremental query scorer shared by
// joint_search and brute_force_topk so both produce bit-identical scores.

#ifndef MSTM_SRC_SCORER_HPP_
#define MSTM_SRC_SCORER_HPP_

#include <string>
#include <vector>

#include "mstm/dataset.hpp"
#include "mstm/error.hpp"
#include "mstm/search.hpp"
#include "mstm/similarity.hpp"
#include "mstm/types.hpp"

namespace mstm {
namespace detail {

// Modalities that contribute to the score: present in the query and
// carrying positive weight.
inline std::vector<std::size_t> effective_modalities(const MultiModalQuery& q,
                                                     const WeightVector& w) {
  std::vector<std::size_t> eff;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (q.present(i) && w.weight(i) > 0.0f) eff.push_back(i);
  return eff;
}

// Incremental scorer for one query over dataset objects. Bounds are
// always computed as float(C - 0.5 * acc) with acc accumulated in double,
// so the admitted value does not depend on whether early exits fire.
class QueryScorer {
 public:
  QueryScorer(const MultiModalDataset& data, const MultiModalQuery& q,
              const WeightVector& w, std::vector<std::size_t> order)
      : data_(&data), q_(&q), order_(std::move(order)) {
    w2_.reserve(order_.size());
    for (std::size_t mod : order_) {
      if (q.parts[mod].size() != data.dim(mod))
        throw UsageError("search: query dimension mismatch at modality " +
                         std::to_string(mod));
      w2_.push_back(w.squared(mod));
      c_ += w2_.back();
    }
  }

  std::size_t effective() const { return order_.size(); }

  PruneResult score(std::uint32_t id, float threshold, bool prune) const {
    double acc = 0.0;
    float bound = static_cast<float>(c_);
    for (std::size_t j = 0; j < order_.size(); ++j) {
      std::size_t mod = order_[j];
      acc += w2_[j] * squared_l2(q_->parts[mod], data_->vec(mod, id));
      bound = static_cast<float>(c_ - 0.5 * acc);
      if (prune && threshold >= bound) return {true, j + 1, bound};
    }
    return {threshold >= bound, order_.size(), bound};
  }

 private:
  const MultiModalDataset* data_;
  const MultiModalQuery* q_;
  std::vector<std::size_t> order_;
  std::vector<double> w2_;
  double c_ = 0.0;
};

}  // namespace detail
}  // namespace mstm

#endif  // MSTM_SRC_SCORER_HPP_
