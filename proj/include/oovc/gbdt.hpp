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

// Multiclass gradient-boosted regression trees with exact split search.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oovc/tensor.hpp"

namespace oovc::gbdt {

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // x <= threshold goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf score, learning rate already applied
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  double predict(std::span<const double> x) const;
  std::size_t depth() const;
  std::size_t leaf_count() const;
};

struct GbdtConfig {
  std::size_t rounds = 100;
  double learning_rate = 0.1;
  std::size_t max_depth = 4;
  std::size_t min_leaf = 10;
  double lambda = 1.0;

  bool operator==(const GbdtConfig&) const = default;
};

void validate(const GbdtConfig& config);

struct GbdtEnsemble {
  std::size_t classes = 0;
  std::size_t features = 0;
  GbdtConfig config;
  std::vector<double> log_priors;
  // trees[r * classes + c] is the tree of class c in round r.
  std::vector<DecisionTree> trees;
  // Training log-loss after each round; entry 0 is the prior-only loss.
  std::vector<double> train_loss;

  std::size_t rounds() const { return classes == 0 ? 0 : trees.size() / classes; }

  // Class distribution from the first `max_rounds` rounds (all by default).
  std::vector<double> predict(std::span<const double> x,
                              std::size_t max_rounds = SIZE_MAX) const;
  std::vector<double> scores(std::span<const double> x,
                             std::size_t max_rounds = SIZE_MAX) const;
  std::size_t predict_class(std::span<const double> x) const;

  std::string serialize() const;
  static GbdtEnsemble deserialize(std::string_view bytes);
};

// One row per sample. `classes` of 0 means max label + 1. Throws
// InvalidInputError when every label is the same or a feature is non-finite.
GbdtEnsemble train(const Matrix<double>& features,
                   std::span<const std::size_t> labels, const GbdtConfig& config,
                   std::size_t classes = 0);

struct GridSpec {
  std::vector<std::size_t> rounds{50, 100, 200};
  std::vector<double> learning_rates{0.05, 0.1};
  std::vector<std::size_t> max_depths{4, 6};
  std::vector<std::size_t> min_leaf{10, 20};

  std::vector<GbdtConfig> points() const;
};

struct GridRow {
  GbdtConfig config;
  std::vector<double> fold_scores;  // macro F1 per fold
  double mean = 0.0;
};

struct GridResult {
  GbdtConfig best;
  std::vector<GridRow> table;  // one row per grid point, in points() order
};

// Stratified k-fold macro F1 for every grid point. Ties go to fewer rounds,
// then shallower trees, then grid order.
GridResult grid_search(const Matrix<double>& features,
                       std::span<const std::size_t> labels,
                       const GridSpec& grid, std::size_t k, std::uint64_t seed,
                       std::size_t classes = 0);

}  // namespace oovc::gbdt
