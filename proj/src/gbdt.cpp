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

#include "oovc/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "oovc/bytes.hpp"
#include "oovc/error.hpp"
#include "oovc/evaluation.hpp"

namespace oovc::gbdt {

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t k = 0;
  while (nodes[k].feature >= 0) {
    const auto& n = nodes[k];
    k = x[n.feature] <= n.threshold ? n.left : n.right;
  }
  return nodes[k].value;
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    best = std::max(best, d[k]);
    if (nodes[k].feature >= 0) {
      d[nodes[k].left] = d[k] + 1;
      d[nodes[k].right] = d[k] + 1;
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return std::count_if(nodes.begin(), nodes.end(),
                       [](const TreeNode& n) { return n.feature < 0; });
}

void validate(const GbdtConfig& c) {
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw InvalidConfigError("gbdt learning rate must be positive");
  }
  if (c.min_leaf == 0) throw InvalidConfigError("gbdt min_leaf must be >= 1");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
    throw InvalidConfigError("gbdt lambda must be non-negative");
  }
}

std::vector<double> GbdtEnsemble::scores(std::span<const double> x,
                                         std::size_t max_rounds) const {
  if (x.size() != features) {
    throw InvalidInputError("feature vector has length " +
                            std::to_string(x.size()) + ", model expects " +
                            std::to_string(features));
  }
  std::vector<double> s = log_priors;
  const std::size_t r_end = std::min(max_rounds, rounds());
  for (std::size_t r = 0; r < r_end; ++r) {
    for (std::size_t c = 0; c < classes; ++c) {
      s[c] += trees[r * classes + c].predict(x);
    }
  }
  return s;
}

namespace {

void softmax_inplace(std::vector<double>& s) {
  const double mx = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double& v : s) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : s) v /= z;
}

}  // namespace

std::vector<double> GbdtEnsemble::predict(std::span<const double> x,
                                          std::size_t max_rounds) const {
  auto s = scores(x, max_rounds);
  softmax_inplace(s);
  return s;
}

std::size_t GbdtEnsemble::predict_class(std::span<const double> x) const {
  const auto s = scores(x);
  return std::max_element(s.begin(), s.end()) - s.begin();
}

namespace {

struct Entry {
  double value;
  std::uint32_t sample;
};

// Sorted values of one feature with its most frequent value (ties: the
// smallest) split off as an implicit block. The block is recovered as node
// totals minus the explicit entries, so sparse columns stay cheap. Only
// order statistics enter, hence any strictly increasing transform of the
// feature reproduces every sum bit for bit.
struct Column {
  std::vector<Entry> entries;
  double default_value = 0.0;
};

std::vector<Column> build_columns(const Matrix<double>& x) {
  std::vector<Column> cols(x.cols);
  std::vector<Entry> all(x.rows);
  for (std::size_t j = 0; j < x.cols; ++j) {
    for (std::size_t i = 0; i < x.rows; ++i) {
      all[i] = {x(i, j), static_cast<std::uint32_t>(i)};
    }
    std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
      return a.value < b.value;
    });
    std::size_t best_start = 0, best_len = 0;
    for (std::size_t a = 0; a < all.size();) {
      std::size_t b = a;
      while (b < all.size() && all[b].value == all[a].value) ++b;
      if (b - a > best_len) {
        best_start = a;
        best_len = b - a;
      }
      a = b;
    }
    auto& col = cols[j];
    col.default_value = all.empty() ? 0.0 : all[best_start].value;
    col.entries.reserve(all.size() - best_len);
    col.entries.insert(col.entries.end(), all.begin(), all.begin() + best_start);
    col.entries.insert(col.entries.end(), all.begin() + best_start + best_len,
                       all.end());
  }
  return cols;
}

struct Stats {
  double g = 0.0;
  double h = 0.0;
  std::size_t n = 0;

  void add(double gi, double hi) {
    g += gi;
    h += hi;
    ++n;
  }
};

struct Split {
  double gain = 0.0;
  std::int32_t feature = -1;
  double threshold = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix<double>& x, const std::vector<Column>& cols,
              const GbdtConfig& cfg)
      : x_(x), cols_(cols), cfg_(cfg) {}

  DecisionTree build(const std::vector<double>& g, const std::vector<double>& h) {
    const std::size_t n = x_.rows;
    DecisionTree tree;
    tree.nodes.emplace_back();
    slot_.assign(n, 0);
    std::vector<std::size_t> slot_node{0};
    std::vector<Stats> stats(1);
    for (std::size_t i = 0; i < n; ++i) stats[0].add(g[i], h[i]);

    for (std::size_t depth = 0;; ++depth) {
      const std::size_t active = slot_node.size();
      std::vector<Split> best(active);
      if (depth < cfg_.max_depth) {
        for (std::size_t j = 0; j < cols_.size(); ++j) {
          scan_feature(j, g, h, stats, best);
        }
      }
      std::vector<std::size_t> next_node;
      std::vector<Stats> next_stats;
      std::vector<std::int32_t> remap(active, -1);
      for (std::size_t s = 0; s < active; ++s) {
        auto& node = tree.nodes[slot_node[s]];
        if (best[s].feature < 0) {
          node.value = -cfg_.learning_rate * stats[s].g / (stats[s].h + cfg_.lambda);
          continue;
        }
        node.feature = best[s].feature;
        node.threshold = best[s].threshold;
        node.left = static_cast<std::int32_t>(tree.nodes.size());
        node.right = node.left + 1;
        remap[s] = static_cast<std::int32_t>(next_node.size());
        next_node.push_back(node.left);
        next_node.push_back(node.right);
        next_stats.resize(next_stats.size() + 2);
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
      }
      if (next_node.empty()) break;
      for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t s = slot_[i];
        if (s < 0) continue;
        if (remap[s] < 0) {
          slot_[i] = -1;
          continue;
        }
        const auto& node = tree.nodes[slot_node[s]];
        const std::int32_t child =
            remap[s] + (x_(i, node.feature) <= node.threshold ? 0 : 1);
        slot_[i] = child;
        next_stats[child].add(g[i], h[i]);
      }
      slot_node = std::move(next_node);
      stats = std::move(next_stats);
    }
    return tree;
  }

 private:
  void scan_feature(std::size_t j, const std::vector<double>& g,
                    const std::vector<double>& h, const std::vector<Stats>& stats,
                    std::vector<Split>& best) {
    const std::size_t active = stats.size();
    const auto& col = cols_[j];
    explicit_.assign(active, Stats{});
    for (const Entry& e : col.entries) {
      const std::int32_t s = slot_[e.sample];
      if (s >= 0) explicit_[s].add(g[e.sample], h[e.sample]);
    }
    left_.assign(active, Stats{});
    has_last_.assign(active, 0);
    last_.assign(active, 0.0);
    default_done_.assign(active, 0);
    for (std::size_t s = 0; s < active; ++s) {
      if (stats[s].n < 2 * cfg_.min_leaf) default_done_[s] = 2;  // cannot split
      else if (explicit_[s].n == stats[s].n) default_done_[s] = 1;
    }

    auto candidate = [&](std::size_t s) {
      const Stats& l = left_[s];
      const Stats& t = stats[s];
      if (l.n < cfg_.min_leaf || t.n - l.n < cfg_.min_leaf) return;
      const double gr = t.g - l.g;
      const double hr = t.h - l.h;
      const double lam = cfg_.lambda;
      const double gain = l.g * l.g / (l.h + lam) + gr * gr / (hr + lam) -
                          t.g * t.g / (t.h + lam);
      // A zero-gain first split is kept so that XOR-like structure can be
      // resolved one level further down.
      if (best[s].feature < 0 ? gain >= 0.0 : gain > best[s].gain) {
        best[s] = {gain, static_cast<std::int32_t>(j), last_[s]};
      }
    };
    auto add_default = [&](std::size_t s) {
      if (has_last_[s]) candidate(s);
      const Stats& t = stats[s];
      const Stats& e = explicit_[s];
      left_[s].g += t.g - e.g;
      left_[s].h += t.h - e.h;
      left_[s].n += t.n - e.n;
      last_[s] = col.default_value;
      has_last_[s] = 1;
      default_done_[s] = 1;
    };

    for (const Entry& e : col.entries) {
      const std::int32_t s = slot_[e.sample];
      if (s < 0 || default_done_[s] == 2) continue;
      if (!default_done_[s] && e.value > col.default_value) add_default(s);
      if (has_last_[s] && e.value != last_[s]) candidate(s);
      left_[s].add(g[e.sample], h[e.sample]);
      last_[s] = e.value;
      has_last_[s] = 1;
    }
    // The block after the last explicit value is never a split point, so a
    // trailing default block only needs its candidate boundary.
    for (std::size_t s = 0; s < active; ++s) {
      if (!default_done_[s] && has_last_[s]) candidate(s);
    }
  }

  const Matrix<double>& x_;
  const std::vector<Column>& cols_;
  const GbdtConfig& cfg_;
  std::vector<std::int32_t> slot_;
  std::vector<Stats> explicit_, left_;
  std::vector<char> has_last_, default_done_;
  std::vector<double> last_;
};

double mean_log_loss(const Matrix<double>& scores,
                     std::span<const std::size_t> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores.rows; ++i) {
    const auto row = scores.row(i);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - mx);
    total += std::log(z) + mx - row[labels[i]];
  }
  return total / static_cast<double>(scores.rows);
}

void scale_leaves(DecisionTree& tree, double factor) {
  for (auto& n : tree.nodes) {
    if (n.feature < 0) n.value *= factor;
  }
}

}  // namespace

GbdtEnsemble train(const Matrix<double>& x, std::span<const std::size_t> labels,
                   const GbdtConfig& config, std::size_t classes) {
  validate(config);
  const std::size_t n = x.rows;
  if (labels.size() != n) {
    throw InvalidInputError("feature rows and label count differ");
  }
  if (n == 0) throw InvalidInputError("gbdt needs at least one sample");
  for (double v : x.data) {
    if (!std::isfinite(v)) throw InvalidInputError("non-finite feature value");
  }
  const std::size_t max_label = *std::max_element(labels.begin(), labels.end());
  if (classes == 0) classes = max_label + 1;
  if (max_label >= classes) throw InvalidInputError("label outside class range");
  if (std::all_of(labels.begin(), labels.end(),
                  [&](std::size_t l) { return l == labels[0]; })) {
    throw InvalidInputError("all training labels are identical");
  }

  GbdtEnsemble model;
  model.classes = classes;
  model.features = x.cols;
  model.config = config;
  std::vector<double> counts(classes, 0.0);
  for (std::size_t l : labels) counts[l] += 1.0;
  for (double c : counts) {
    // An absent class gets a tiny prior instead of -inf.
    model.log_priors.push_back(std::log(std::max(c, 1e-6) / static_cast<double>(n)));
  }

  Matrix<double> f(n, classes);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(model.log_priors.begin(), model.log_priors.end(), f.row_ptr(i));
  }
  double loss = mean_log_loss(f, labels);
  model.train_loss.push_back(loss);

  const auto cols = build_columns(x);
  TreeBuilder builder(x, cols, config);
  Matrix<double> prob(n, classes);
  std::vector<double> g(n), h(n);
  Matrix<double> delta(n, classes);
  Matrix<double> trial(n, classes);
  for (std::size_t r = 0; r < config.rounds; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> p(f.row(i).begin(), f.row(i).end());
      softmax_inplace(p);
      std::copy(p.begin(), p.end(), prob.row_ptr(i));
    }
    const std::size_t first = model.trees.size();
    for (std::size_t c = 0; c < classes; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = prob(i, c);
        g[i] = p - (labels[i] == c ? 1.0 : 0.0);
        h[i] = std::max(p * (1.0 - p), 1e-16);
      }
      model.trees.push_back(builder.build(g, h));
      for (std::size_t i = 0; i < n; ++i) {
        delta(i, c) = model.trees.back().predict(x.row(i));
      }
    }
    // Newton steps can overshoot; halve the round until the loss does not
    // rise, ending at an all-zero round in the worst case.
    double scale = 1.0;
    double next_loss = 0.0;
    for (int attempt = 0;; ++attempt) {
      for (std::size_t k = 0; k < f.data.size(); ++k) {
        trial.data[k] = f.data[k] + scale * delta.data[k];
      }
      next_loss = mean_log_loss(trial, labels);
      if (next_loss <= loss) break;
      if (attempt == 40) {
        scale = 0.0;
        trial = f;
        next_loss = loss;
        break;
      }
      scale *= 0.5;
    }
    if (scale != 1.0) {
      for (std::size_t c = 0; c < classes; ++c) {
        scale_leaves(model.trees[first + c], scale);
      }
    }
    std::swap(f, trial);
    loss = next_loss;
    model.train_loss.push_back(loss);
  }
  return model;
}

std::vector<GbdtConfig> GridSpec::points() const {
  if (rounds.empty() || learning_rates.empty() || max_depths.empty() ||
      min_leaf.empty()) {
    throw InvalidConfigError("every grid dimension needs a candidate");
  }
  std::vector<GbdtConfig> out;
  for (std::size_t r : rounds) {
    for (double lr : learning_rates) {
      for (std::size_t d : max_depths) {
        for (std::size_t m : min_leaf) {
          GbdtConfig c;
          c.rounds = r;
          c.learning_rate = lr;
          c.max_depth = d;
          c.min_leaf = m;
          validate(c);
          out.push_back(c);
        }
      }
    }
  }
  return out;
}

GridResult grid_search(const Matrix<double>& x,
                       std::span<const std::size_t> labels, const GridSpec& grid,
                       std::size_t k, std::uint64_t seed, std::size_t classes) {
  const auto points = grid.points();
  if (labels.size() != x.rows) {
    throw InvalidInputError("feature rows and label count differ");
  }
  if (classes == 0) {
    classes = *std::max_element(labels.begin(), labels.end()) + 1;
  }
  const auto plan = eval::stratified_kfold(labels, k, seed);
  GridResult result;
  for (const auto& p : points) result.table.push_back({p, {}, 0.0});

  for (std::size_t fold = 0; fold < k; ++fold) {
    const auto train_idx = plan.train_indices(fold);
    const auto& test_idx = plan.folds[fold];
    Matrix<double> xtr(train_idx.size(), x.cols);
    std::vector<std::size_t> ytr;
    for (std::size_t r = 0; r < train_idx.size(); ++r) {
      std::copy_n(x.row_ptr(train_idx[r]), x.cols, xtr.row_ptr(r));
      ytr.push_back(labels[train_idx[r]]);
    }
    std::vector<std::size_t> gold;
    for (std::size_t i : test_idx) gold.push_back(labels[i]);

    // Round counts share one training run: the first r rounds of a longer
    // run are exactly the r-round model.
    std::vector<char> done(points.size(), 0);
    for (std::size_t a = 0; a < points.size(); ++a) {
      if (done[a]) continue;
      std::size_t max_rounds = 0;
      std::vector<std::size_t> group;
      for (std::size_t b = a; b < points.size(); ++b) {
        const auto& pa = points[a];
        const auto& pb = points[b];
        if (pa.learning_rate == pb.learning_rate &&
            pa.max_depth == pb.max_depth && pa.min_leaf == pb.min_leaf &&
            pa.lambda == pb.lambda) {
          group.push_back(b);
          max_rounds = std::max(max_rounds, pb.rounds);
        }
      }
      GbdtConfig cfg = points[a];
      cfg.rounds = max_rounds;
      const auto model = train(xtr, ytr, cfg, classes);
      for (std::size_t b : group) {
        std::vector<std::size_t> pred;
        for (std::size_t i : test_idx) {
          const auto s = model.scores(x.row(i), points[b].rounds);
          pred.push_back(std::max_element(s.begin(), s.end()) - s.begin());
        }
        result.table[b].fold_scores.push_back(
            eval::compute_metrics(gold, pred, classes).macro_f1);
        done[b] = 1;
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t a = 0; a < result.table.size(); ++a) {
    auto& row = result.table[a];
    row.mean = std::accumulate(row.fold_scores.begin(), row.fold_scores.end(), 0.0) /
               static_cast<double>(k);
    const auto& b = result.table[best];
    const bool better =
        row.mean > b.mean ||
        (row.mean == b.mean &&
         (row.config.rounds < b.config.rounds ||
          (row.config.rounds == b.config.rounds &&
           row.config.max_depth < b.config.max_depth)));
    if (a != best && better) best = a;
  }
  result.best = result.table[best].config;
  return result;
}

std::string GbdtEnsemble::serialize() const {
  ByteWriter w;
  w.u64(classes);
  w.u64(features);
  w.u64(config.rounds);
  w.f64(config.learning_rate);
  w.u64(config.max_depth);
  w.u64(config.min_leaf);
  w.f64(config.lambda);
  w.u64(log_priors.size());
  for (double v : log_priors) w.f64(v);
  w.u64(train_loss.size());
  for (double v : train_loss) w.f64(v);
  w.u64(trees.size());
  for (const auto& t : trees) {
    w.u64(t.nodes.size());
    for (const auto& n : t.nodes) {
      w.put(n.feature);
      w.f64(n.threshold);
      w.put(n.left);
      w.put(n.right);
      w.f64(n.value);
    }
  }
  return w.take();
}

GbdtEnsemble GbdtEnsemble::deserialize(std::string_view bytes) {
  ByteReader r(bytes, "gbdt section");
  GbdtEnsemble m;
  m.classes = r.u64();
  m.features = r.u64();
  m.config.rounds = r.u64();
  m.config.learning_rate = r.f64();
  m.config.max_depth = r.u64();
  m.config.min_leaf = r.u64();
  m.config.lambda = r.f64();
  const std::uint64_t np = r.count(8);
  for (std::uint64_t i = 0; i < np; ++i) m.log_priors.push_back(r.f64());
  const std::uint64_t nl = r.count(8);
  for (std::uint64_t i = 0; i < nl; ++i) m.train_loss.push_back(r.f64());
  const std::uint64_t nt = r.count(8);
  for (std::uint64_t t = 0; t < nt; ++t) {
    DecisionTree tree;
    const std::uint64_t nn = r.count(28);
    for (std::uint64_t k = 0; k < nn; ++k) {
      TreeNode n;
      n.feature = r.get<std::int32_t>();
      n.threshold = r.f64();
      n.left = r.get<std::int32_t>();
      n.right = r.get<std::int32_t>();
      n.value = r.f64();
      if (n.feature >= 0 &&
          (static_cast<std::uint64_t>(n.feature) >= m.features ||
           n.left <= static_cast<std::int64_t>(k) || n.right <= n.left ||
           static_cast<std::uint64_t>(n.right) >= nn)) {
        throw ContainerError("gbdt section: malformed tree node");
      }
      tree.nodes.push_back(n);
    }
    if (tree.nodes.empty()) throw ContainerError("gbdt section: empty tree");
    m.trees.push_back(std::move(tree));
  }
  r.expect_done();
  if (m.log_priors.size() != m.classes || m.classes == 0 ||
      m.trees.size() % m.classes != 0) {
    throw ContainerError("gbdt section: inconsistent class count");
  }
  return m;
}

}  // namespace oovc::gbdt
