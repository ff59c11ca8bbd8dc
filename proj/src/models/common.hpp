// Copyright 2026 The oovc Authors.
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

#pragma once

// Training-loop plumbing shared by the model files.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "oovc/error.hpp"
#include "oovc/models.hpp"
#include "oovc/nn.hpp"

namespace oovc::models::detail {

using Params = nn::LayerParams<float>;

inline void append(std::vector<Matrix<float>*>& out, Params& p) {
  for (auto* m : p.pointers()) out.push_back(m);
}

inline void append(std::vector<const Matrix<float>*>& out, const Params& p) {
  for (const auto* m : p.pointers()) out.push_back(m);
}

// Scales every gradient so the global L2 norm is at most `max_norm`.
inline void clip_global_norm(std::span<Matrix<float>* const> grads,
                             double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (const auto* g : grads) {
    for (float v : g->data) sq += static_cast<double>(v) * v;
  }
  if (!std::isfinite(sq)) throw TrainingError("non-finite gradient; training diverged");
  const double norm = std::sqrt(sq);
  if (norm <= max_norm) return;
  const float s = static_cast<float>(max_norm / norm);
  for (auto* g : grads) {
    for (float& v : g->data) v *= s;
  }
}

inline std::vector<double> softmax_double(std::span<const float> logits) {
  std::vector<double> p(logits.size());
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(static_cast<double>(logits[i]) - mx);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

struct EpochPlan {
  std::size_t max_epochs = 50;
  std::size_t min_epochs = 1;
  std::size_t patience = 3;
  std::size_t batch_size = 16;
};

// Shuffled minibatch epochs with early stopping. `train_batch(indices)`
// returns the summed loss of the batch; `validate()` returns the held-out
// loss or nullopt; `save_best()` is called whenever the held-out loss
// improves (every epoch when there is no held-out data).
template <typename BatchFn, typename ValFn, typename SaveFn>
std::vector<EpochLog> run_epochs(std::vector<std::size_t> items,
                                 const EpochPlan& plan, nn::Rng& rng,
                                 BatchFn&& train_batch, ValFn&& validate,
                                 SaveFn&& save_best) {
  std::vector<EpochLog> history;
  double best = std::numeric_limits<double>::infinity();
  std::size_t bad = 0;
  const std::size_t bs = std::max<std::size_t>(1, plan.batch_size);
  for (std::size_t epoch = 0; epoch < plan.max_epochs; ++epoch) {
    std::shuffle(items.begin(), items.end(), rng);
    double total = 0.0;
    for (std::size_t start = 0; start < items.size(); start += bs) {
      const std::size_t end = std::min(items.size(), start + bs);
      const double loss =
          train_batch(std::span<const std::size_t>(items.data() + start, end - start));
      if (!std::isfinite(loss)) {
        throw TrainingError("training loss became non-finite in epoch " +
                            std::to_string(epoch + 1));
      }
      total += loss;
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.train_loss = items.empty() ? 0.0 : total / static_cast<double>(items.size());
    const std::optional<double> val = validate();
    log.validation_loss = val ? *val : std::numeric_limits<double>::quiet_NaN();
    history.push_back(log);
    if (!val) {
      save_best();
      continue;
    }
    if (!std::isfinite(*val)) {
      throw TrainingError("validation loss became non-finite in epoch " +
                          std::to_string(epoch + 1));
    }
    if (*val < best) {
      best = *val;
      bad = 0;
      save_best();
    } else {
      ++bad;
      if (epoch + 1 >= plan.min_epochs && bad >= plan.patience) break;
    }
  }
  return history;
}

// Row-sparse gradient bookkeeping for an embedding table.
struct TouchedRows {
  std::vector<char> flag;
  std::vector<std::size_t> rows;

  explicit TouchedRows(std::size_t n) : flag(n, 0) {}
  void add(std::size_t r) {
    if (!flag[r]) {
      flag[r] = 1;
      rows.push_back(r);
    }
  }
  void sort() { std::sort(rows.begin(), rows.end()); }
  void clear(Matrix<float>& grad) {
    for (std::size_t r : rows) {
      std::fill_n(grad.row_ptr(r), grad.cols, 0.0f);
      flag[r] = 0;
    }
    rows.clear();
  }
};

inline void check_labels(std::span<const std::size_t> labels,
                         std::size_t classes, std::size_t docs) {
  if (docs == 0) throw InvalidInputError("training set is empty");
  if (labels.size() != docs) {
    throw InvalidInputError("document and label counts differ");
  }
  if (classes < 2) throw InvalidInputError("classification needs at least two classes");
  for (std::size_t l : labels) {
    if (l >= classes) throw InvalidInputError("label outside 0..classes-1");
  }
  if (std::all_of(labels.begin(), labels.end(),
                  [&](std::size_t l) { return l == labels[0]; })) {
    throw InvalidInputError("training labels contain a single class");
  }
}

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Stratified hold-out of roughly `fraction` of the documents. Nothing is held
// out when the fraction is 0 or the set is too small to spare a document.
Split validation_split(std::span<const std::size_t> labels, double fraction,
                       std::uint64_t seed);

}  // namespace oovc::models::detail
