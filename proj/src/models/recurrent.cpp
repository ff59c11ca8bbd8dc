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

#include <algorithm>
#include <cmath>

#include "common.hpp"
#include "oovc/evaluation.hpp"

namespace oovc::models {

namespace detail {

Split validation_split(std::span<const std::size_t> labels, double fraction,
                       std::uint64_t seed) {
  Split s;
  const std::size_t n = labels.size();
  const auto held = static_cast<std::size_t>(std::llround(fraction * n));
  if (fraction <= 0.0 || held == 0 || held >= n) {
    s.train.resize(n);
    std::iota(s.train.begin(), s.train.end(), 0);
    return s;
  }
  auto tt = eval::split_train_test(labels, 1.0 - fraction, true, seed);
  s.train = std::move(tt.train);
  s.validation = std::move(tt.test);
  return s;
}

}  // namespace detail

using detail::Params;

void validate(const TrainingConfig& c) {
  if (c.hidden == 0) throw InvalidConfigError("hidden size must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) {
    throw InvalidConfigError("dropout must lie in [0, 1)");
  }
  if (c.batch_size == 0) throw InvalidConfigError("batch size must be positive");
  if (!(c.learning_rate > 0.0)) {
    throw InvalidConfigError("learning rate must be positive");
  }
  if (c.max_epochs == 0) throw InvalidConfigError("max_epochs must be positive");
  if (!(c.validation_fraction >= 0.0 && c.validation_fraction < 1.0)) {
    throw InvalidConfigError("validation fraction must lie in [0, 1)");
  }
}

Matrix<float> word_inputs(const embed::EmbeddingTable& table,
                          const text::WordVocab& vocab,
                          std::span<const std::string> tokens) {
  std::vector<std::size_t> ids = vocab.encode(tokens);
  if (ids.empty()) ids.push_back(vocab.oov_index());
  return nn::embedding_forward(table.params, ids);
}

std::vector<float> ws_feature(const Matrix<float>& word_vectors) {
  std::vector<float> sum(word_vectors.cols, 0.0f);
  for (std::size_t r = 0; r < word_vectors.rows; ++r) {
    for (std::size_t c = 0; c < word_vectors.cols; ++c) sum[c] += word_vectors(r, c);
  }
  return nn::l2_normalize<float>(sum);
}

std::vector<float> ws_feature(const embed::EmbeddingTable& table,
                              const text::WordVocab& vocab,
                              std::span<const std::string> tokens) {
  if (tokens.empty()) return std::vector<float>(table.dim(), 0.0f);
  return ws_feature(word_inputs(table, vocab, tokens));
}

std::vector<float> RecurrentClassifier::last_hidden(const Matrix<float>& inputs) const {
  const auto out = nn::gru_forward(gru, inputs);
  const auto last = out.last();
  return {last.begin(), last.end()};
}

std::vector<double> RecurrentClassifier::distribution(
    const Matrix<float>& inputs) const {
  const auto h = last_hidden(inputs);
  const auto logits =
      nn::dense_forward<float>(output, h, nn::Activation::kIdentity);
  return detail::softmax_double(logits);
}

RecurrentClassifier train_recurrent(std::span<const std::vector<std::string>> docs,
                                    std::span<const std::size_t> labels,
                                    std::size_t classes,
                                    const text::WordVocab& vocab,
                                    embed::EmbeddingTable initial,
                                    const TrainingConfig& config) {
  validate(config);
  detail::check_labels(labels, classes, docs.size());
  if (initial.rows() != vocab.rows()) {
    throw InvalidInputError("embedding table has " + std::to_string(initial.rows()) +
                            " rows, vocabulary needs " + std::to_string(vocab.rows()));
  }

  RecurrentClassifier model;
  model.embeddings = std::move(initial);
  model.classes = classes;
  model.dropout = config.dropout;
  const std::size_t d = model.embeddings.dim();
  model.gru = nn::init_params<float>(nn::LayerKind::kGru, {d, config.hidden, 2}, {},
                                     config.seed + 1);
  model.output = nn::init_params<float>(nn::LayerKind::kDense,
                                        {config.hidden, classes}, {}, config.seed + 2);

  std::vector<std::vector<std::size_t>> ids(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ids[i] = vocab.encode(docs[i]);
    if (ids[i].empty()) ids[i].push_back(vocab.oov_index());
  }
  const auto split =
      detail::validation_split(labels, config.validation_fraction, config.seed);

  Params g_emb = model.embeddings.params.zeros_like();
  Params g_gru = model.gru.zeros_like();
  Params g_out = model.output.zeros_like();
  std::vector<Matrix<float>*> params, grads;
  detail::append(params, model.embeddings.params);
  detail::append(params, model.gru);
  detail::append(params, model.output);
  detail::append(grads, g_emb);
  detail::append(grads, g_gru);
  detail::append(grads, g_out);
  std::vector<const Matrix<float>*> cparams(params.begin(), params.end());
  std::vector<const Matrix<float>*> cgrads(grads.begin(), grads.end());
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  auto adam = nn::make_adam_state<float>(adam_cfg, cparams);

  nn::Rng rng(config.seed + 3);
  detail::TouchedRows touched(model.embeddings.rows());
  std::vector<char> ever_touched(model.embeddings.rows(), 0);
  const std::size_t H = config.hidden;

  auto train_batch = [&](std::span<const std::size_t> batch) {
    double loss = 0.0;
    const float inv = 1.0f / static_cast<float>(batch.size());
    for (std::size_t doc : batch) {
      const auto& seq = ids[doc];
      const auto x = nn::embedding_forward(model.embeddings.params, seq);
      nn::GruTape<float> tape;
      const auto out = nn::gru_forward(model.gru, x, {}, &tape);
      std::vector<float> mask;
      const auto hd = nn::dropout_apply<float>(out.last(), config.dropout, true, rng, &mask);
      const auto logits = nn::dense_forward<float>(model.output, hd, nn::Activation::kIdentity);
      const auto p = detail::softmax_double(logits);
      loss -= std::log(std::max(p[labels[doc]], 1e-300));
      std::vector<float> dlogits(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        dlogits[c] = static_cast<float>(p[c] - (c == labels[doc] ? 1.0 : 0.0)) * inv;
      }
      std::vector<float> dh(H, 0.0f);
      nn::dense_backward<float>(model.output, hd, logits, nn::Activation::kIdentity,
                                dlogits, g_out, dh);
      Matrix<float> d_top(x.rows, H);
      for (std::size_t k = 0; k < H; ++k) d_top(x.rows - 1, k) = dh[k] * mask[k];
      Matrix<float> dx;
      nn::gru_backward(model.gru, tape, d_top, g_gru, &dx);
      nn::embedding_backward(seq, dx, g_emb);
      for (std::size_t id : seq) {
        touched.add(id);
        ever_touched[id] = 1;
      }
    }
    if (!std::isfinite(loss)) return loss;
    detail::clip_global_norm(grads, config.clip_norm);
    touched.sort();
    const nn::RowSubset sparse[] = {{0, touched.rows}};
    nn::adam_step<float>(adam, params, cgrads, sparse);
    touched.clear(g_emb.weights[0]);
    g_gru.set_zero();
    g_out.set_zero();
    return loss;
  };

  auto validate_fn = [&]() -> std::optional<double> {
    if (split.validation.empty()) return std::nullopt;
    double loss = 0.0;
    for (std::size_t doc : split.validation) {
      const auto x = nn::embedding_forward(model.embeddings.params, ids[doc]);
      const auto p = model.distribution(x);
      loss -= std::log(std::max(p[labels[doc]], 1e-300));
    }
    return loss / static_cast<double>(split.validation.size());
  };

  RecurrentClassifier best;
  auto save = [&] {
    best.embeddings = model.embeddings;
    best.gru = model.gru;
    best.output = model.output;
  };

  detail::EpochPlan plan{config.max_epochs, 1, config.patience, config.batch_size};
  model.history = detail::run_epochs(split.train, plan, rng, train_batch,
                                     validate_fn, save);
  model.embeddings = std::move(best.embeddings);
  model.gru = std::move(best.gru);
  model.output = std::move(best.output);
  std::vector<std::size_t> tuned_rows;
  for (std::size_t r = 0; r < ever_touched.size(); ++r) {
    if (ever_touched[r]) tuned_rows.push_back(r);
  }
  model.embeddings.mark_tuned(tuned_rows);
  model.trained = true;
  return model;
}

}  // namespace oovc::models
