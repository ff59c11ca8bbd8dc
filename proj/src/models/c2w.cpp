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

namespace oovc::models {

using detail::Params;

namespace {

std::vector<Matrix<float>> char_inputs(std::span<const std::string> tokens) {
  std::vector<Matrix<float>> out;
  for (const auto& t : tokens) {
    auto ids = text::encode_chars(t).ids;
    if (ids.empty()) ids.push_back(text::CharVocab::kSpace);
    out.push_back(one_hot_chars(ids));
  }
  if (out.empty()) {
    const std::size_t space[] = {text::CharVocab::kSpace};
    out.push_back(one_hot_chars(space));
  }
  return out;
}

struct WordTape {
  nn::BiLstmTape<float> lstm;
  std::vector<float> read;
  std::vector<float> emb;
  std::size_t steps = 0;
};

std::vector<float> embed_word(const C2WModel& m, const Matrix<float>& chars,
                              WordTape* tape) {
  const auto o = nn::bilstm_forward(m.char_bilstm, chars, tape ? &tape->lstm : nullptr);
  std::vector<float> read(o.fwd.row(o.fwd.rows - 1).begin(), o.fwd.row(o.fwd.rows - 1).end());
  read.insert(read.end(), o.bwd.row(0).begin(), o.bwd.row(0).end());
  auto emb = nn::dense_forward<float>(m.projection, read, nn::Activation::kIdentity);
  if (tape) {
    tape->read = std::move(read);
    tape->emb = emb;
    tape->steps = chars.rows;
  }
  return emb;
}

Matrix<float> embed_words(const C2WModel& m, const std::vector<Matrix<float>>& words,
                          std::vector<WordTape>* tapes) {
  Matrix<float> out(words.size(), m.word_dim());
  if (tapes) tapes->assign(words.size(), {});
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto e = embed_word(m, words[i], tapes ? &(*tapes)[i] : nullptr);
    std::copy(e.begin(), e.end(), out.row_ptr(i));
  }
  return out;
}

}  // namespace

Matrix<float> C2WModel::word_embeddings(std::span<const std::string> tokens) const {
  return embed_words(*this, char_inputs(tokens), nullptr);
}

std::vector<double> C2WModel::distribution(std::span<const std::string> tokens) const {
  const auto w = word_embeddings(tokens);
  const auto h = nn::gru_forward(gru, w);
  const auto logits = nn::dense_forward<float>(output, h.last(), nn::Activation::kIdentity);
  return detail::softmax_double(logits);
}

C2WModel train_c2w(std::span<const std::vector<std::string>> docs,
                   std::span<const std::size_t> labels, std::size_t classes,
                   const C2WConfig& config) {
  const auto& tc = config.training;
  validate(tc);
  detail::check_labels(labels, classes, docs.size());
  if (config.char_hidden == 0) throw InvalidConfigError("char hidden size must be positive");
  const std::size_t wd = config.word_dim == 0 ? 32 : config.word_dim;

  C2WModel model;
  model.classes = classes;
  model.dropout = tc.dropout;
  model.char_bilstm = nn::init_params<float>(
      nn::LayerKind::kBiLstm, {text::CharVocab::kSize, config.char_hidden, 2}, {}, tc.seed + 31);
  model.projection = nn::init_params<float>(nn::LayerKind::kDense,
                                            {2 * config.char_hidden, wd}, {}, tc.seed + 32);
  model.gru = nn::init_params<float>(nn::LayerKind::kGru, {wd, tc.hidden, 2}, {}, tc.seed + 33);
  model.output = nn::init_params<float>(nn::LayerKind::kDense, {tc.hidden, classes}, {},
                                        tc.seed + 34);

  std::vector<std::vector<Matrix<float>>> inputs;
  for (const auto& d : docs) inputs.push_back(char_inputs(d));
  const auto split = detail::validation_split(labels, tc.validation_fraction, tc.seed);

  Params g_lstm = model.char_bilstm.zeros_like();
  Params g_proj = model.projection.zeros_like();
  Params g_gru = model.gru.zeros_like();
  Params g_out = model.output.zeros_like();
  std::vector<Matrix<float>*> params, grads;
  for (auto* p : {&model.char_bilstm, &model.projection, &model.gru, &model.output}) {
    detail::append(params, *p);
  }
  for (auto* p : {&g_lstm, &g_proj, &g_gru, &g_out}) detail::append(grads, *p);
  std::vector<const Matrix<float>*> cparams(params.begin(), params.end());
  std::vector<const Matrix<float>*> cgrads(grads.begin(), grads.end());
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = tc.learning_rate;
  auto adam = nn::make_adam_state<float>(adam_cfg, cparams);
  nn::Rng rng(tc.seed + 35);
  const std::size_t H = tc.hidden;
  const std::size_t CH = config.char_hidden;

  auto step_batch = [&](std::span<const std::size_t> batch) {
    double loss = 0.0;
    const float inv = 1.0f / static_cast<float>(batch.size());
    for (std::size_t doc : batch) {
      std::vector<WordTape> wtapes;
      const auto w = embed_words(model, inputs[doc], &wtapes);
      nn::GruTape<float> tape;
      const auto out = nn::gru_forward(model.gru, w, {}, &tape);
      std::vector<float> mask;
      const auto hd = nn::dropout_apply<float>(out.last(), tc.dropout, true, rng, &mask);
      const auto logits = nn::dense_forward<float>(model.output, hd, nn::Activation::kIdentity);
      const auto p = detail::softmax_double(logits);
      loss -= std::log(std::max(p[labels[doc]], 1e-300));
      std::vector<float> dlogits(classes);
      for (std::size_t c = 0; c < classes; ++c) {
        dlogits[c] = static_cast<float>(p[c] - (c == labels[doc] ? 1.0 : 0.0)) * inv;
      }
      std::vector<float> dh(H, 0.0f);
      nn::dense_backward<float>(model.output, hd, logits, nn::Activation::kIdentity, dlogits,
                                g_out, dh);
      Matrix<float> d_top(w.rows, H);
      for (std::size_t k = 0; k < H; ++k) d_top(w.rows - 1, k) = dh[k] * mask[k];
      Matrix<float> dw;
      nn::gru_backward(model.gru, tape, d_top, g_gru, &dw);
      for (std::size_t i = 0; i < wtapes.size(); ++i) {
        const auto& wt = wtapes[i];
        std::vector<float> d_read(2 * CH, 0.0f);
        nn::dense_backward<float>(model.projection, wt.read, wt.emb, nn::Activation::kIdentity,
                                  dw.row(i), g_proj, d_read);
        Matrix<float> d_fwd(wt.steps, CH), d_bwd(wt.steps, CH);
        std::copy_n(d_read.begin(), CH, d_fwd.row_ptr(wt.steps - 1));
        std::copy_n(d_read.begin() + CH, CH, d_bwd.row_ptr(0));
        nn::bilstm_backward(model.char_bilstm, wt.lstm, d_fwd, d_bwd, g_lstm,
                            static_cast<Matrix<float>*>(nullptr));
      }
    }
    if (!std::isfinite(loss)) return loss;
    detail::clip_global_norm(grads, tc.clip_norm);
    nn::adam_step<float>(adam, params, cgrads);
    for (auto* m : grads) m->fill(0.0f);
    return loss;
  };

  auto validate_fn = [&]() -> std::optional<double> {
    if (split.validation.empty()) return std::nullopt;
    double loss = 0.0;
    for (std::size_t doc : split.validation) {
      const auto w = embed_words(model, inputs[doc], nullptr);
      const auto h = nn::gru_forward(model.gru, w);
      const auto logits =
          nn::dense_forward<float>(model.output, h.last(), nn::Activation::kIdentity);
      loss -= std::log(std::max(detail::softmax_double(logits)[labels[doc]], 1e-300));
    }
    return loss / static_cast<double>(split.validation.size());
  };

  C2WModel best = model;
  auto save = [&] {
    best.char_bilstm = model.char_bilstm;
    best.projection = model.projection;
    best.gru = model.gru;
    best.output = model.output;
  };
  detail::EpochPlan plan{tc.max_epochs, 1, tc.patience, tc.batch_size};
  best.history = detail::run_epochs(split.train, plan, rng, step_batch, validate_fn, save);
  return best;
}

}  // namespace oovc::models
