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

void validate(const CompositionConfig& c) {
  if (c.hidden == 0 || c.tanh_hidden == 0 || c.encoder_hidden == 0) {
    throw InvalidConfigError("composition layer sizes must be positive");
  }
  if (c.kind == ComposerKind::kBiLstm && c.layers == 0) {
    throw InvalidConfigError("composition LSTM needs at least one layer");
  }
  if (c.kind == ComposerKind::kCnn && c.filter_widths.empty()) {
    throw InvalidConfigError("composition CNN needs filter widths");
  }
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) {
    throw InvalidConfigError("dropout must lie in [0, 1)");
  }
  if (!(c.learning_rate > 0.0) || c.batch_size == 0 || c.max_epochs == 0) {
    throw InvalidConfigError("composition optimizer settings must be positive");
  }
  if (!(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0)) {
    throw InvalidConfigError("held-out word fraction must lie in (0, 1)");
  }
}

Matrix<float> one_hot_chars(std::span<const std::size_t> char_ids) {
  Matrix<float> m(char_ids.size(), text::CharVocab::kSize);
  for (std::size_t t = 0; t < char_ids.size(); ++t) m(t, char_ids[t]) = 1.0f;
  return m;
}

Matrix<float> ContextEncoder::encode(std::span<const std::size_t> char_ids) const {
  const auto out = nn::bilstm_forward(bilstm, one_hot_chars(char_ids));
  Matrix<float> avg(out.fwd.rows, out.fwd.cols);
  for (std::size_t i = 0; i < avg.data.size(); ++i) {
    avg.data[i] = 0.5f * (out.fwd.data[i] + out.bwd.data[i]);
  }
  return avg;
}

namespace {

struct ComposerTape {
  nn::BiLstmTape<float> lstm;
  nn::ConvTape<float> conv;
  std::size_t steps = 0;
  std::vector<float> read, hidden, mask, dropped, out;
};

std::vector<float> read_chars(const CompositionModel& m, const Matrix<float>& x,
                              ComposerTape* tape) {
  if (x.rows == 0) throw InvalidInputError("cannot compose an empty word");
  if (m.kind == ComposerKind::kCnn) {
    return nn::conv_maxpool_forward(m.reader, x, tape ? &tape->conv : nullptr);
  }
  const auto o = nn::bilstm_forward(m.reader, x, tape ? &tape->lstm : nullptr);
  // Last forward state has read the whole prefix, the backward state at the
  // first position the whole suffix.
  std::vector<float> r(o.fwd.row(o.fwd.rows - 1).begin(), o.fwd.row(o.fwd.rows - 1).end());
  r.insert(r.end(), o.bwd.row(0).begin(), o.bwd.row(0).end());
  return r;
}

std::vector<float> composer_forward(const CompositionModel& m, const Matrix<float>& x,
                                    ComposerTape* tape, nn::Rng* rng) {
  auto read = read_chars(m, x, tape);
  auto hidden = nn::dense_forward<float>(m.hidden, read, nn::Activation::kTanh);
  std::vector<float> mask;
  auto dropped = rng ? nn::dropout_apply<float>(hidden, m.dropout, true, *rng, &mask)
                     : hidden;
  auto out = nn::dense_forward<float>(m.output, dropped, nn::Activation::kIdentity);
  if (tape) {
    tape->steps = x.rows;
    tape->read = std::move(read);
    tape->hidden = std::move(hidden);
    tape->mask = std::move(mask);
    tape->dropped = std::move(dropped);
    tape->out = out;
  }
  return out;
}

struct ComposerGrads {
  Params reader, hidden, output;
};

// `d_inputs` receives the gradient w.r.t. the character input rows when given.
void composer_backward(const CompositionModel& m, const ComposerTape& tape,
                       std::span<const float> d_out, ComposerGrads& g,
                       Matrix<float>* d_inputs) {
  std::vector<float> d_dropped(tape.dropped.size(), 0.0f);
  nn::dense_backward<float>(m.output, tape.dropped, tape.out, nn::Activation::kIdentity,
                            d_out, g.output, d_dropped);
  for (std::size_t i = 0; i < d_dropped.size(); ++i) d_dropped[i] *= tape.mask[i];
  std::vector<float> d_read(tape.read.size(), 0.0f);
  nn::dense_backward<float>(m.hidden, tape.read, tape.hidden, nn::Activation::kTanh,
                            d_dropped, g.hidden, d_read);
  if (m.kind == ComposerKind::kCnn) {
    nn::conv_maxpool_backward<float>(m.reader, tape.conv, d_read, g.reader, d_inputs);
    return;
  }
  const std::size_t H = m.reader.shape.hidden_dim;
  Matrix<float> d_fwd(tape.steps, H), d_bwd(tape.steps, H);
  std::copy_n(d_read.begin(), H, d_fwd.row_ptr(tape.steps - 1));
  std::copy_n(d_read.begin() + H, H, d_bwd.row_ptr(0));
  nn::bilstm_backward(m.reader, tape.lstm, d_fwd, d_bwd, g.reader, d_inputs);
}

CompositionModel init_composer(const CompositionConfig& c, std::size_t input_dim,
                               std::size_t d, bool context_mode) {
  CompositionModel m;
  m.kind = c.kind;
  m.context_mode = context_mode;
  m.dropout = c.dropout;
  std::size_t read_dim = 0;
  if (c.kind == ComposerKind::kBiLstm) {
    m.reader = nn::init_params<float>(nn::LayerKind::kBiLstm,
                                      {input_dim, c.hidden, c.layers}, {}, c.seed + 11);
    read_dim = 2 * c.hidden;
  } else {
    m.reader = nn::init_params<float>(nn::LayerKind::kConvMaxPool,
                                      {input_dim, c.hidden, 1, c.filter_widths}, {},
                                      c.seed + 11);
    read_dim = c.hidden * c.filter_widths.size();
  }
  m.hidden = nn::init_params<float>(nn::LayerKind::kDense, {read_dim, c.tanh_hidden}, {},
                                    c.seed + 12);
  m.output = nn::init_params<float>(nn::LayerKind::kDense, {c.tanh_hidden, d}, {},
                                    c.seed + 13);
  return m;
}

ComposerGrads zero_grads(const CompositionModel& m) {
  return {m.reader.zeros_like(), m.hidden.zeros_like(), m.output.zeros_like()};
}

// Held-out word types, chosen by a seeded shuffle.
std::vector<char> holdout_words(std::size_t n, double fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  nn::Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(fraction * n)), 1, n - 1);
  std::vector<char> held(n, 0);
  for (std::size_t i = 0; i < k; ++i) held[order[i]] = 1;
  return held;
}

void check_table(const embed::EmbeddingTable& tuned, const text::WordVocab& vocab) {
  if (vocab.size() < 10) {
    throw InvalidInputError("composition training needs at least 10 vocabulary words, got " +
                            std::to_string(vocab.size()));
  }
  if (tuned.rows() != vocab.rows()) {
    throw InvalidInputError("embedding table does not match the vocabulary");
  }
}

}  // namespace

std::vector<float> CompositionModel::forward(const Matrix<float>& char_inputs) const {
  return composer_forward(*this, char_inputs, nullptr, nullptr);
}

CompositionModel train_composition(const embed::EmbeddingTable& tuned,
                                   const text::WordVocab& vocab,
                                   const CompositionConfig& config) {
  validate(config);
  check_table(tuned, vocab);
  const std::size_t n = vocab.size();
  const std::size_t d = tuned.dim();
  CompositionModel model = init_composer(config, text::CharVocab::kSize, d, false);

  std::vector<Matrix<float>> inputs(n);
  for (std::size_t w = 0; w < n; ++w) {
    inputs[w] = one_hot_chars(text::encode_chars(vocab.word(w)).ids);
  }
  const auto held = holdout_words(n, config.holdout_fraction, config.seed);
  // One stream entry per corpus occurrence.
  std::vector<std::size_t> stream;
  std::vector<std::size_t> held_words;
  for (std::size_t w = 0; w < n; ++w) {
    if (held[w]) {
      held_words.push_back(w);
      continue;
    }
    const std::uint64_t f = std::max<std::uint64_t>(1, vocab.frequency(w));
    stream.insert(stream.end(), f, w);
  }

  auto g = zero_grads(model);
  std::vector<Matrix<float>*> params, grads;
  detail::append(params, model.reader);
  detail::append(params, model.hidden);
  detail::append(params, model.output);
  detail::append(grads, g.reader);
  detail::append(grads, g.hidden);
  detail::append(grads, g.output);
  std::vector<const Matrix<float>*> cparams(params.begin(), params.end());
  std::vector<const Matrix<float>*> cgrads(grads.begin(), grads.end());
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  auto adam = nn::make_adam_state<float>(adam_cfg, cparams);
  nn::Rng rng(config.seed + 14);

  auto step_batch = [&](std::span<const std::size_t> batch) {
    double loss = 0.0;
    const float scale = 1.0f / static_cast<float>(batch.size());
    std::vector<float> d_out(d);
    for (std::size_t w : batch) {
      ComposerTape tape;
      const auto out = composer_forward(model, inputs[w], &tape, &rng);
      const auto target = tuned.row(w);
      loss += nn::mse<float>(out, target);
      std::fill(d_out.begin(), d_out.end(), 0.0f);
      nn::mse_gradient<float>(out, target, d_out, scale);
      composer_backward(model, tape, d_out, g, nullptr);
    }
    if (!std::isfinite(loss)) return loss;
    detail::clip_global_norm(grads, 5.0);
    nn::adam_step<float>(adam, params, cgrads);
    for (auto* m : grads) m->fill(0.0f);
    return loss;
  };
  auto validate_fn = [&]() -> std::optional<double> {
    double loss = 0.0;
    for (std::size_t w : held_words) loss += nn::mse<float>(model.forward(inputs[w]), tuned.row(w));
    return loss / static_cast<double>(held_words.size());
  };
  CompositionModel best = model;
  auto save = [&] {
    best.reader = model.reader;
    best.hidden = model.hidden;
    best.output = model.output;
  };
  detail::EpochPlan plan{config.max_epochs, config.min_epochs, config.patience,
                         config.batch_size};
  auto history = detail::run_epochs(stream, plan, rng, step_batch, validate_fn, save);
  best.history = std::move(history);
  return best;
}

std::vector<float> compose(const CompositionModel& model, std::string_view word) {
  if (model.context_mode) {
    throw InvalidConfigError("context-mode composer needs the surrounding text");
  }
  if (word.empty()) throw InvalidInputError("cannot compose an empty word");
  return model.forward(one_hot_chars(text::encode_chars(word).ids));
}

ContextComposer train_context_encoder_joint(
    std::span<const std::vector<std::string>> docs, const embed::EmbeddingTable& tuned,
    const text::WordVocab& vocab, const CompositionConfig& config) {
  validate(config);
  check_table(tuned, vocab);
  const std::size_t d = tuned.dim();
  ContextComposer model;
  model.encoder.bilstm = nn::init_params<float>(
      nn::LayerKind::kBiLstm, {text::CharVocab::kSize, config.encoder_hidden, 1}, {},
      config.seed + 21);
  model.composer = init_composer(config, config.encoder_hidden, d, true);
  const auto held = holdout_words(vocab.size(), config.holdout_fraction, config.seed);

  struct Doc {
    Matrix<float> chars;  // one-hot rows
    std::vector<text::CharSpan> spans;
    std::vector<std::size_t> words;  // vocab index per span, OOV when unseen
  };
  std::vector<Doc> prepared;
  std::vector<std::size_t> doc_ids;
  std::size_t held_occurrences = 0;
  for (const auto& tokens : docs) {
    if (tokens.empty()) continue;
    const auto seq = text::encode_text_chars(tokens);
    Doc doc{one_hot_chars(seq.ids), seq.spans, vocab.encode(tokens)};
    for (std::size_t w : doc.words) held_occurrences += w < held.size() && held[w];
    doc_ids.push_back(prepared.size());
    prepared.push_back(std::move(doc));
  }
  if (prepared.empty()) throw InvalidInputError("no non-empty texts for the context encoder");

  Params g_enc = model.encoder.bilstm.zeros_like();
  auto g = zero_grads(model.composer);
  std::vector<Matrix<float>*> params, grads;
  detail::append(params, model.encoder.bilstm);
  detail::append(params, model.composer.reader);
  detail::append(params, model.composer.hidden);
  detail::append(params, model.composer.output);
  detail::append(grads, g_enc);
  detail::append(grads, g.reader);
  detail::append(grads, g.hidden);
  detail::append(grads, g.output);
  std::vector<const Matrix<float>*> cparams(params.begin(), params.end());
  std::vector<const Matrix<float>*> cgrads(grads.begin(), grads.end());
  nn::AdamConfig adam_cfg;
  adam_cfg.learning_rate = config.learning_rate;
  auto adam = nn::make_adam_state<float>(adam_cfg, cparams);
  nn::Rng rng(config.seed + 22);
  const std::size_t E = config.encoder_hidden;

  auto span_rows = [](const Matrix<float>& m, text::CharSpan s) {
    Matrix<float> out(s.end - s.begin, m.cols);
    std::copy(m.row_ptr(s.begin), m.row_ptr(s.end), out.data.begin());
    return out;
  };

  // Summed MSE over the targeted spans of one document; trains when `train`.
  auto run_doc = [&](const Doc& doc, bool train, bool held_only, std::size_t* count) {
    nn::BiLstmTape<float> etape;
    const auto enc = nn::bilstm_forward(model.encoder.bilstm, doc.chars,
                                        train ? &etape : nullptr);
    Matrix<float> avg(enc.fwd.rows, E);
    for (std::size_t i = 0; i < avg.data.size(); ++i) {
      avg.data[i] = 0.5f * (enc.fwd.data[i] + enc.bwd.data[i]);
    }
    Matrix<float> d_avg(avg.rows, E);
    double loss = 0.0;
    std::vector<float> d_out(d);
    for (std::size_t t = 0; t < doc.spans.size(); ++t) {
      const std::size_t w = doc.words[t];
      if (w >= held.size()) continue;  // unseen word: no target
      if (static_cast<bool>(held[w]) != held_only) continue;
      const auto x = span_rows(avg, doc.spans[t]);
      if (x.rows == 0) continue;
      ++*count;
      if (!train) {
        loss += nn::mse<float>(model.composer.forward(x), tuned.row(w));
        continue;
      }
      ComposerTape tape;
      const auto out = composer_forward(model.composer, x, &tape, &rng);
      loss += nn::mse<float>(out, tuned.row(w));
      std::fill(d_out.begin(), d_out.end(), 0.0f);
      nn::mse_gradient<float>(out, tuned.row(w), d_out);
      Matrix<float> dx;
      composer_backward(model.composer, tape, d_out, g, &dx);
      for (std::size_t r = 0; r < dx.rows; ++r) {
        float* dst = d_avg.row_ptr(doc.spans[t].begin + r);
        for (std::size_t k = 0; k < E; ++k) dst[k] += dx(r, k);
      }
    }
    if (train) {
      Matrix<float> half(d_avg.rows, E);
      for (std::size_t i = 0; i < half.data.size(); ++i) half.data[i] = 0.5f * d_avg.data[i];
      nn::bilstm_backward(model.encoder.bilstm, etape, half, half, g_enc, static_cast<Matrix<float>*>(nullptr));
    }
    return loss;
  };

  auto step_batch = [&](std::span<const std::size_t> batch) {
    double loss = 0.0;
    std::size_t count = 0;
    for (std::size_t i : batch) loss += run_doc(prepared[i], true, false, &count);
    if (count == 0) return 0.0;
    // Per-occurrence mean: rescale the summed gradients.
    const float s = 1.0f / static_cast<float>(count);
    for (auto* m : grads) {
      for (float& v : m->data) v *= s;
    }
    if (!std::isfinite(loss)) return loss;
    detail::clip_global_norm(grads, 5.0);
    nn::adam_step<float>(adam, params, cgrads);
    for (auto* m : grads) m->fill(0.0f);
    return loss / static_cast<double>(count) * static_cast<double>(batch.size());
  };
  auto validate_fn = [&]() -> std::optional<double> {
    if (held_occurrences == 0) return std::nullopt;
    double loss = 0.0;
    std::size_t count = 0;
    for (const auto& doc : prepared) loss += run_doc(doc, false, true, &count);
    return loss / static_cast<double>(count);
  };
  ContextComposer best = model;
  auto save = [&] {
    best.encoder = model.encoder;
    best.composer.reader = model.composer.reader;
    best.composer.hidden = model.composer.hidden;
    best.composer.output = model.composer.output;
  };
  const std::size_t docs_per_batch =
      std::max<std::size_t>(1, config.batch_size / 8);
  detail::EpochPlan plan{config.max_epochs, config.min_epochs, config.patience,
                         docs_per_batch};
  best.composer.history =
      detail::run_epochs(doc_ids, plan, rng, step_batch, validate_fn, save);
  return best;
}

std::vector<float> compose(const ContextComposer& model,
                           std::span<const std::string> tokens, std::size_t index) {
  if (index >= tokens.size()) throw InvalidInputError("token index out of range");
  if (tokens[index].empty()) throw InvalidInputError("cannot compose an empty word");
  const auto seq = text::encode_text_chars(tokens);
  const auto enc = model.encoder.encode(seq.ids);
  const auto s = seq.spans[index];
  Matrix<float> x(s.end - s.begin, enc.cols);
  std::copy(enc.row_ptr(s.begin), enc.row_ptr(s.end), x.data.begin());
  return model.composer.forward(x);
}

}  // namespace oovc::models
