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

namespace {

struct MethodInfo {
  Method method;
  const char* tag;
  Family family;
};

constexpr MethodInfo kMethodInfo[] = {
    {Method::kHs, "hs", Family::kNone},
    {Method::kCharHs, "char-hs", Family::kNone},
    {Method::kHsCng, "hs-cng", Family::kHsCng},
    {Method::kAugmentedHsCng, "augmented-hs-cng", Family::kHsCng},
    {Method::kContextHsCng, "context-hs-cng", Family::kHsCng},
    {Method::kWs, "ws", Family::kWs},
    {Method::kCharWs, "char-ws", Family::kCharWs},
    {Method::kWsCng, "ws-cng", Family::kWsCng},
    {Method::kAugmentedWsCng, "augmented-ws-cng", Family::kWsCng},
    {Method::kContextWsCng, "context-ws-cng", Family::kWsCng},
};

const MethodInfo& info(Method m) {
  for (const auto& i : kMethodInfo) {
    if (i.method == m) return i;
  }
  throw InvalidConfigError("unknown method id " +
                           std::to_string(static_cast<std::uint32_t>(m)));
}

// The method whose features train the GBDT of a family.
Method plain_method(Family f) {
  switch (f) {
    case Family::kHsCng: return Method::kHsCng;
    case Family::kWs: return Method::kWs;
    case Family::kWsCng: return Method::kWsCng;
    case Family::kCharWs: return Method::kCharWs;
    case Family::kNone: break;
  }
  throw InvalidConfigError("feature family has no GBDT");
}

[[noreturn]] void missing(Method m, const char* what) {
  throw InvalidConfigError(std::string("method ") + to_string(m) + " needs a trained " +
                           what);
}

}  // namespace

const char* to_string(Method m) { return info(m).tag; }

Method parse_method(std::string_view tag) {
  std::string valid;
  for (const auto& i : kMethodInfo) {
    if (tag == i.tag) return i.method;
    valid += valid.empty() ? "" : ", ";
    valid += i.tag;
  }
  throw InvalidConfigError("unknown method '" + std::string(tag) + "' (valid: " + valid +
                           ")");
}

Family family(Method m) { return info(m).family; }

bool needs_recurrent(Method m) {
  return m != Method::kCharHs && m != Method::kCharWs;
}
bool needs_c2w(Method m) { return m == Method::kCharHs || m == Method::kCharWs; }
bool needs_ngrams(Method m) {
  const Family f = family(m);
  return f == Family::kHsCng || f == Family::kWsCng;
}
bool needs_composition(Method m) {
  return m == Method::kAugmentedHsCng || m == Method::kAugmentedWsCng;
}
bool needs_context(Method m) {
  return m == Method::kContextHsCng || m == Method::kContextWsCng;
}

Matrix<float> method_word_inputs(Method method, const Components& c,
                                 std::span<const std::string> tokens) {
  if (!c.recurrent) missing(method, "recurrent classifier");
  const auto& table = c.recurrent->embeddings;
  if (needs_composition(method) && !c.composition) missing(method, "composition model");
  if (needs_context(method) && !c.context) missing(method, "context encoder");
  if (tokens.empty()) return word_inputs(table, c.vocab, tokens);

  Matrix<float> out(tokens.size(), table.dim());
  Matrix<float> encoded;  // context encoder output, computed on first use
  text::CharSequence seq;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const auto id = c.vocab.find(tokens[t]);
    std::vector<float> v;
    if (id) {
      const auto row = table.row(*id);
      std::copy(row.begin(), row.end(), out.row_ptr(t));
      continue;
    }
    if (needs_composition(method)) {
      v = compose(*c.composition, tokens[t]);
    } else if (needs_context(method)) {
      if (seq.ids.empty()) {
        seq = text::encode_text_chars(tokens);
        encoded = c.context->encoder.encode(seq.ids);
      }
      const auto s = seq.spans[t];
      Matrix<float> x(s.end - s.begin, encoded.cols);
      std::copy(encoded.row_ptr(s.begin), encoded.row_ptr(s.end), x.data.begin());
      v = c.context->composer.forward(x);
    } else {
      const auto row = table.row(table.oov_row());
      v.assign(row.begin(), row.end());
    }
    std::copy(v.begin(), v.end(), out.row_ptr(t));
  }
  return out;
}

FeatureBundle build_feature_bundle(Method method, const text::NormalizedText& text,
                                   const Components& c) {
  FeatureBundle b;
  b.method = method;
  std::vector<float> base;
  switch (family(method)) {
    case Family::kNone:
      if (method == Method::kCharHs) {
        throw InvalidConfigError("char-hs classifies directly and has no feature bundle");
      }
      [[fallthrough]];
    case Family::kHsCng:
      if (!c.recurrent) missing(method, "recurrent classifier");
      base = c.recurrent->last_hidden(method_word_inputs(method, c, text.tokens));
      break;
    case Family::kWs:
    case Family::kWsCng:
      if (text.tokens.empty()) {
        if (!c.recurrent) missing(method, "recurrent classifier");
        base.assign(c.recurrent->embeddings.dim(), 0.0f);
      } else {
        base = ws_feature(method_word_inputs(method, c, text.tokens));
      }
      break;
    case Family::kCharWs:
      if (!c.c2w) missing(method, "char-to-word model");
      base = text.tokens.empty() ? std::vector<float>(c.c2w->word_dim(), 0.0f)
                                 : ws_feature(c.c2w->word_embeddings(text.tokens));
      break;
  }
  b.base_length = base.size();
  b.values.assign(base.begin(), base.end());
  if (needs_ngrams(method)) {
    if (!c.ngrams) missing(method, "n-gram vectorizer");
    const auto ng = c.ngrams->transform(text.normalized);
    b.values.insert(b.values.end(), ng.begin(), ng.end());
  }
  return b;
}

std::vector<double> predict(Method method, const Components& c,
                            const text::NormalizedText& text) {
  if (method == Method::kHs) {
    if (!c.recurrent) missing(method, "recurrent classifier");
    return c.recurrent->distribution(method_word_inputs(method, c, text.tokens));
  }
  if (method == Method::kCharHs) {
    if (!c.c2w) missing(method, "char-to-word model");
    return c.c2w->distribution(text.tokens);
  }
  const auto it = c.gbdt.find(family(method));
  if (it == c.gbdt.end()) missing(method, "GBDT");
  return it->second.predict(build_feature_bundle(method, text, c).values);
}

Components train_components(std::span<const Method> methods,
                            std::span<const text::NormalizedText> texts,
                            std::span<const std::size_t> labels, std::size_t classes,
                            const PipelineConfig& config,
                            std::optional<embed::EmbeddingTable> initial,
                            std::optional<text::WordVocab> vocab) {
  if (methods.empty()) throw InvalidConfigError("no methods requested");
  detail::check_labels(labels, classes, texts.size());
  auto any = [&](bool (*pred)(Method)) {
    return std::any_of(methods.begin(), methods.end(), pred);
  };

  Components c;
  c.classes = classes;
  c.vocab = vocab ? std::move(*vocab) : text::WordVocab::build(texts);
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> normalized;
  for (const auto& t : texts) {
    docs.push_back(t.tokens);
    normalized.push_back(t.normalized);
  }

  if (any(needs_recurrent)) {
    embed::EmbeddingTable table =
        initial ? std::move(*initial)
                : embed::random_table(c.vocab, config.embedding_dim, config.seed);
    TrainingConfig rc = config.recurrent;
    rc.seed = config.seed;
    c.recurrent = train_recurrent(docs, labels, classes, c.vocab, std::move(table), rc);
  }
  if (any(needs_c2w)) {
    C2WConfig cc = config.c2w;
    cc.training.seed = config.seed + 1;
    if (cc.word_dim == 0) {
      cc.word_dim = c.recurrent ? c.recurrent->embeddings.dim() : config.embedding_dim;
    }
    c.c2w = train_c2w(docs, labels, classes, cc);
  }
  if (any(needs_ngrams)) {
    c.ngrams = text::NgramVectorizer::fit(normalized, config.ngram);
  }
  if (any(needs_composition)) {
    CompositionConfig cc = config.composition;
    cc.seed = config.seed + 2;
    c.composition = train_composition(c.recurrent->embeddings, c.vocab, cc);
  }
  if (any(needs_context)) {
    CompositionConfig cc = config.composition;
    cc.seed = config.seed + 3;
    c.context = train_context_encoder_joint(docs, c.recurrent->embeddings, c.vocab, cc);
  }

  std::vector<Family> families;
  for (Method m : methods) {
    const Family f = family(m);
    if (f != Family::kNone &&
        std::find(families.begin(), families.end(), f) == families.end()) {
      families.push_back(f);
    }
  }
  for (Family f : families) {
    const Method m = plain_method(f);
    Matrix<double> x;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      const auto b = build_feature_bundle(m, texts[i], c);
      if (i == 0) x = Matrix<double>(texts.size(), b.values.size());
      std::copy(b.values.begin(), b.values.end(), x.row_ptr(i));
    }
    gbdt::GbdtConfig gc = config.gbdt;
    if (config.grid_search) {
      gc = gbdt::grid_search(x, labels, config.grid, config.grid_folds, config.seed, classes)
               .best;
    }
    c.gbdt.emplace(f, gbdt::train(x, labels, gc, classes));
  }
  return c;
}

}  // namespace oovc::models
