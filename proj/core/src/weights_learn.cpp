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

#include "mstm/weights_learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mstm/error.hpp"
#include "mstm/log.hpp"
#include "mstm/similarity.hpp"

namespace mstm {
namespace {

// Per-modality inner products of one anchor against one object; absent
// anchor modalities give 0.
std::vector<double> modality_ips(const MultiModalQuery& anchor,
                                 const MultiModalDataset& data,
                                 std::uint32_t id) {
  std::size_t m = data.modalities();
  std::vector<double> ips(m, 0.0);
  for (std::size_t mod = 0; mod < m; ++mod)
    if (anchor.present(mod))
      ips[mod] = inner_product(anchor.parts[mod], data.vec(mod, id));
  return ips;
}

double weighted(const std::vector<double>& ips, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < ips.size(); ++i) s += w[i] * w[i] * ips[i];
  return s;
}

void validate_batch(const std::vector<TrainingPair>& batch,
                    const std::vector<std::vector<std::uint32_t>>& negatives,
                    const MultiModalDataset& data, std::size_t weights) {
  if (batch.size() != negatives.size())
    throw UsageError("contrastive_loss: one negative set per pair required");
  if (weights != data.modalities())
    throw UsageError("contrastive_loss: weight count mismatch");
  for (const TrainingPair& p : batch)
    if (p.positive >= data.size())
      throw UsageError("contrastive_loss: positive id out of range");
}

// Softmax weights of {positive} + negatives for one anchor, stabilized.
// Returns sigma for the positive and each negative.
struct Softmax {
  double positive;
  std::vector<double> negatives;
};

Softmax softmax_scores(double pos_score, const std::vector<double>& neg_scores) {
  double mx = pos_score;
  for (double s : neg_scores) mx = std::max(mx, s);
  double ep = std::exp(pos_score - mx);
  double z = ep;
  std::vector<double> en(neg_scores.size());
  for (std::size_t j = 0; j < neg_scores.size(); ++j) {
    en[j] = std::exp(neg_scores[j] - mx);
    z += en[j];
  }
  Softmax out;
  out.positive = ep / z;
  out.negatives.resize(en.size());
  for (std::size_t j = 0; j < en.size(); ++j) out.negatives[j] = en[j] / z;
  return out;
}

}  // namespace

std::vector<std::uint32_t> mine_negatives(const MultiModalQuery& anchor,
                                          std::uint32_t positive,
                                          const MultiModalDataset& data,
                                          const WeightVector& w,
                                          std::size_t k) {
  std::size_t n = data.size();
  if (n == 0) throw UsageError("mine_negatives: empty dataset");
  if (k < 1) throw UsageError("mine_negatives: k must be >= 1");
  struct Scored {
    double s;
    std::uint32_t id;
  };
  std::vector<Scored> scored;
  scored.reserve(n);
  for (std::size_t id = 0; id < n; ++id) {
    auto ips = modality_ips(anchor, data, static_cast<std::uint32_t>(id));
    double s = 0.0;
    for (std::size_t mod = 0; mod < ips.size(); ++mod)
      s += w.squared(mod) * ips[mod];
    scored.push_back({s, static_cast<std::uint32_t>(id)});
  }
  std::size_t take = std::min(k, n);
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const Scored& a, const Scored& b) {
                      if (a.s != b.s) return a.s > b.s;
                      return a.id < b.id;
                    });
  std::vector<std::uint32_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i)
    if (scored[i].id != positive) out.push_back(scored[i].id);
  return out;
}

double contrastive_loss(const std::vector<TrainingPair>& batch,
                        const std::vector<std::vector<std::uint32_t>>& negatives,
                        const MultiModalDataset& data,
                        const std::vector<double>& w) {
  validate_batch(batch, negatives, data, w.size());
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t p = 0; p < batch.size(); ++p) {
    if (negatives[p].empty()) continue;
    double pos = weighted(modality_ips(batch[p].anchor, data, batch[p].positive), w);
    std::vector<double> neg(negatives[p].size());
    for (std::size_t j = 0; j < negatives[p].size(); ++j)
      neg[j] = weighted(modality_ips(batch[p].anchor, data, negatives[p][j]), w);
    double mx = pos;
    for (double s : neg) mx = std::max(mx, s);
    double z = std::exp(pos - mx);
    for (double s : neg) z += std::exp(s - mx);
    total += -(pos - mx - std::log(z));
  }
  return total / static_cast<double>(batch.size());
}

double contrastive_loss(const std::vector<TrainingPair>& batch,
                        const std::vector<std::vector<std::uint32_t>>& negatives,
                        const MultiModalDataset& data, const WeightVector& w) {
  std::vector<double> raw(w.raw().begin(), w.raw().end());
  return contrastive_loss(batch, negatives, data, raw);
}

std::vector<double> loss_gradient(
    const std::vector<TrainingPair>& batch,
    const std::vector<std::vector<std::uint32_t>>& negatives,
    const MultiModalDataset& data, const std::vector<double>& w) {
  validate_batch(batch, negatives, data, w.size());
  std::size_t m = w.size();
  std::vector<double> grad(m, 0.0);
  if (batch.empty()) return grad;
  for (std::size_t p = 0; p < batch.size(); ++p) {
    if (negatives[p].empty()) continue;
    auto pos_ips = modality_ips(batch[p].anchor, data, batch[p].positive);
    double pos = weighted(pos_ips, w);
    std::vector<std::vector<double>> neg_ips(negatives[p].size());
    std::vector<double> neg(negatives[p].size());
    for (std::size_t j = 0; j < negatives[p].size(); ++j) {
      neg_ips[j] = modality_ips(batch[p].anchor, data, negatives[p][j]);
      neg[j] = weighted(neg_ips[j], w);
    }
    Softmax sm = softmax_scores(pos, neg);
    for (std::size_t i = 0; i < m; ++i) {
      double g = (sm.positive - 1.0) * 2.0 * w[i] * pos_ips[i];
      for (std::size_t j = 0; j < neg.size(); ++j)
        g += sm.negatives[j] * 2.0 * w[i] * neg_ips[j][i];
      grad[i] += g;
    }
  }
  for (double& g : grad) g /= static_cast<double>(batch.size());
  return grad;
}

namespace {

// Flat anchor x object x modality inner-product table; everything the
// trainer needs is a weighted reduction over it.
class IpTable {
 public:
  IpTable(const std::vector<TrainingPair>& pairs,
          const MultiModalDataset& data)
      : n_(data.size()), m_(data.modalities()), table_(pairs.size() * n_ * m_) {
    for (std::size_t a = 0; a < pairs.size(); ++a)
      for (std::size_t o = 0; o < n_; ++o) {
        auto ips = modality_ips(pairs[a].anchor, data,
                                static_cast<std::uint32_t>(o));
        for (std::size_t i = 0; i < m_; ++i) table_[at(a, o, i)] = ips[i];
      }
  }

  double ip(std::size_t a, std::size_t o, std::size_t i) const {
    return table_[at(a, o, i)];
  }

  double score(std::size_t a, std::size_t o,
               const std::vector<double>& w2) const {
    double s = 0.0;
    const double* row = table_.data() + at(a, o, 0);
    for (std::size_t i = 0; i < m_; ++i) s += w2[i] * row[i];
    return s;
  }

  std::size_t objects() const { return n_; }
  std::size_t modalities() const { return m_; }

 private:
  std::size_t at(std::size_t a, std::size_t o, std::size_t i) const {
    return (a * n_ + o) * m_ + i;
  }
  std::size_t n_, m_;
  std::vector<double> table_;
};

// Top-k object ids of anchor a by current score, ties by lower id.
std::vector<std::uint32_t> table_topk(const IpTable& tab, std::size_t a,
                                      const std::vector<double>& w2,
                                      std::size_t k) {
  struct Scored {
    double s;
    std::uint32_t id;
  };
  std::vector<Scored> scored;
  scored.reserve(tab.objects());
  for (std::size_t o = 0; o < tab.objects(); ++o)
    scored.push_back({tab.score(a, o, w2), static_cast<std::uint32_t>(o)});
  std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + take, scored.end(),
                    [](const Scored& x, const Scored& y) {
                      if (x.s != y.s) return x.s > y.s;
                      return x.id < y.id;
                    });
  std::vector<std::uint32_t> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].id);
  return out;
}

std::vector<double> squares(const std::vector<double>& w) {
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  return w2;
}

}  // namespace

TrainReport train_weights(const std::vector<TrainingPair>& pairs,
                          const MultiModalDataset& data,
                          const TrainConfig& cfg) {
  if (pairs.empty()) throw UsageError("train_weights: no training pairs");
  if (data.size() == 0) throw UsageError("train_weights: empty dataset");
  if (cfg.learning_rate <= 0.0)
    throw UsageError("train_weights: learning_rate must be positive");
  if (cfg.iterations < 1 || cfg.negatives < 1 || cfg.minibatch < 1 ||
      cfg.remine_every < 1)
    throw UsageError("train_weights: counts must be >= 1");
  for (const TrainingPair& p : pairs)
    if (p.positive >= data.size())
      throw UsageError("train_weights: positive id out of range");

  std::size_t na = pairs.size();
  std::size_t n = data.size();
  std::size_t m = data.modalities();
  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> w(m);
  for (double& wi : w) wi = 1.0 - uni(rng);  // in (0, 1]

  IpTable tab(pairs, data);
  std::vector<std::vector<std::uint32_t>> negs(na);

  // Shuffled cycling order for minibatches.
  std::vector<std::size_t> order(na);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  // Loss/recall against the current top-k confusers of each anchor; used
  // for the trajectories under either mining strategy.
  auto eval_hard = [&](const std::vector<double>& weights, double& loss_out,
                       double& recall_out) {
    std::vector<double> w2 = squares(weights);
    double total = 0.0;
    std::size_t correct = 0;
    for (std::size_t a = 0; a < na; ++a) {
      auto top = table_topk(tab, a, w2, cfg.negatives + 1);
      std::vector<std::uint32_t> hard;
      for (std::uint32_t id : top) {
        if (id == pairs[a].positive) continue;
        hard.push_back(id);
        if (hard.size() == cfg.negatives) break;
      }
      double pos = tab.score(a, pairs[a].positive, w2);
      if (hard.empty()) {
        ++correct;
        continue;
      }
      double best_neg = tab.score(a, hard[0], w2);
      double mx = std::max(pos, best_neg);
      double z = std::exp(pos - mx);
      for (std::uint32_t id : hard) {
        double s = tab.score(a, id, w2);
        best_neg = std::max(best_neg, s);
        z += std::exp(s - mx);
      }
      total += -(pos - mx - std::log(z));
      if (pos > best_neg) ++correct;
    }
    loss_out = total / static_cast<double>(na);
    recall_out = static_cast<double>(correct) / static_cast<double>(na);
  };

  TrainReport report{WeightVector({1.0f}), {}, {}};
  report.loss.reserve(cfg.iterations);
  report.recall.reserve(cfg.iterations);

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    if (it % cfg.remine_every == 0) {
      std::vector<double> w2 = squares(w);
      if (cfg.mining == MiningStrategy::kHard) {
        for (std::size_t a = 0; a < na; ++a) {
          auto top = table_topk(tab, a, w2, cfg.negatives);
          negs[a].clear();
          for (std::uint32_t id : top)
            if (id != pairs[a].positive) negs[a].push_back(id);
        }
      } else {
        // k distinct uniform draws per anchor, positive filtered out.
        std::uniform_int_distribution<std::uint32_t> pick(
            0, static_cast<std::uint32_t>(n - 1));
        std::size_t draw = std::min(cfg.negatives, n);
        for (std::size_t a = 0; a < na; ++a) {
          negs[a].clear();
          std::vector<char> taken(n, 0);
          std::size_t got = 0;
          while (got < draw) {
            std::uint32_t id = pick(rng);
            if (taken[id]) continue;
            taken[id] = 1;
            ++got;
            if (id != pairs[a].positive) negs[a].push_back(id);
          }
        }
      }
    }

    // Minibatch gradient, negatives fixed.
    std::size_t batch_size = std::min(cfg.minibatch, na);
    std::vector<double> grad(m, 0.0);
    std::vector<double> w2 = squares(w);
    for (std::size_t b = 0; b < batch_size; ++b) {
      if (cursor == na) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      std::size_t a = order[cursor++];
      if (negs[a].empty()) continue;
      double pos = tab.score(a, pairs[a].positive, w2);
      std::vector<double> neg(negs[a].size());
      for (std::size_t j = 0; j < negs[a].size(); ++j)
        neg[j] = tab.score(a, negs[a][j], w2);
      Softmax sm = softmax_scores(pos, neg);
      for (std::size_t i = 0; i < m; ++i) {
        double g = (sm.positive - 1.0) * 2.0 * w[i] *
                   tab.ip(a, pairs[a].positive, i);
        for (std::size_t j = 0; j < neg.size(); ++j)
          g += sm.negatives[j] * 2.0 * w[i] * tab.ip(a, negs[a][j], i);
        grad[i] += g;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      grad[i] /= static_cast<double>(batch_size);
      if (!std::isfinite(grad[i]))
        throw TrainError("train_weights: non-finite gradient at step " +
                         std::to_string(it));
      w[i] = std::max(w[i] - cfg.learning_rate * grad[i], 0.0);
    }

    double loss = 0.0, recall = 0.0;
    eval_hard(w, loss, recall);
    if (!std::isfinite(loss))
      throw TrainError("train_weights: non-finite loss at step " +
                       std::to_string(it));
    report.loss.push_back(loss);
    report.recall.push_back(recall);
  }

  bool any_positive = false;
  for (double wi : w) any_positive |= wi > 0.0;
  if (!any_positive)
    throw TrainError("train_weights: weights collapsed to zero");
  std::vector<float> raw(m);
  for (std::size_t i = 0; i < m; ++i) raw[i] = static_cast<float>(w[i]);
  report.weights = WeightVector(raw);
  MSTM_LOG_INFO("trained weights over ", cfg.iterations,
                " iterations, final loss ", report.loss.back());
  return report;
}

}  // namespace mstm
