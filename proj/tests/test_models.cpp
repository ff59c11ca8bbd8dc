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

#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oovc/error.hpp"
#include "oovc/models.hpp"

using namespace oovc;
using namespace oovc::models;

namespace {

const std::vector<std::vector<std::string>> kMarkers{
    {"zorp", "zorpy", "blick"}, {"quav", "quavish", "drent"}, {"mupo", "mupos", "flarn"}};
const std::vector<std::string> kFiller{"river", "house", "green", "table", "window",
                                       "music", "paper", "stone", "cloud", "garden",
                                       "market", "winter", "bottle", "letter", "street"};

struct Corpus {
  std::vector<text::NormalizedText> texts;
  std::vector<std::vector<std::string>> docs;
  std::vector<std::size_t> labels;
};

Corpus make_corpus(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % 3;
    std::vector<std::string> toks;
    const std::size_t len = 3 + rng() % 4;
    for (std::size_t k = 0; k < len; ++k) toks.push_back(kFiller[rng() % kFiller.size()]);
    const auto& lex = kMarkers[label];
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(rng() % (toks.size() + 1)),
                lex[rng() % lex.size()]);
    c.texts.push_back(text::normalize_and_tokenize(text::join_tokens(toks),
                                                   text::default_stopwords()));
    c.docs.push_back(c.texts.back().tokens);
    c.labels.push_back(label);
  }
  return c;
}

TrainingConfig small_training() {
  TrainingConfig t;
  t.hidden = 16;
  t.max_epochs = 30;
  t.patience = 5;
  t.batch_size = 8;
  t.learning_rate = 1e-2;
  t.dropout = 0.2;
  return t;
}

CompositionConfig small_composition() {
  CompositionConfig c;
  c.kind = ComposerKind::kCnn;
  c.hidden = 8;
  c.tanh_hidden = 16;
  c.encoder_hidden = 8;
  c.max_epochs = 15;
  c.patience = 15;
  c.dropout = 0.0;
  return c;
}

PipelineConfig small_pipeline() {
  PipelineConfig p;
  p.embedding_dim = 8;
  p.recurrent = small_training();
  p.c2w.training = small_training();
  p.c2w.char_hidden = 8;
  p.composition = small_composition();
  p.gbdt.rounds = 10;
  p.gbdt.min_leaf = 2;
  return p;
}

double accuracy(const std::vector<std::vector<double>>& dists,
                const std::vector<std::size_t>& labels) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    const auto& d = dists[i];
    ok += static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin()) ==
          labels[i];
  }
  return static_cast<double>(ok) / static_cast<double>(dists.size());
}

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

// Vocabulary whose tuned vectors are built from letter content, so spelling
// predicts the embedding.
std::pair<text::WordVocab, embed::EmbeddingTable> spelled_table(std::size_t n,
                                                                std::size_t d) {
  std::mt19937_64 rng(5);
  const std::string cons = "bdgkmprt";
  const std::string vow = "aeiou";
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  while (words.size() < n) {
    std::string w;
    for (int s = 0; s < 2; ++s) {
      w += cons[rng() % cons.size()];
      w += vow[rng() % vow.size()];
    }
    if (std::find(words.begin(), words.end(), w) != words.end()) continue;
    words.push_back(w);
    freq.push_back(1 + rng() % 6);
  }
  auto vocab = text::WordVocab::from_entries(words, freq);
  auto table = embed::random_table(vocab, d, 2);
  std::normal_distribution<float> nd(0.0f, 1.0f);
  std::vector<std::vector<float>> letter(26, std::vector<float>(d));
  for (auto& l : letter) {
    for (auto& x : l) x = nd(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (char ch : words[i]) {
      for (std::size_t j = 0; j < d; ++j) table.matrix()(i, j) += 0.1f * letter[ch - 'a'][j];
    }
  }
  return {std::move(vocab), std::move(table)};
}

}  // namespace

TEST_CASE("method tags round trip") {
  for (Method m : kAllMethods) CHECK(parse_method(to_string(m)) == m);
  CHECK(std::string(to_string(Method::kAugmentedWsCng)) == "augmented-ws-cng");
  CHECK_THROWS_AS(parse_method("augmented"), InvalidConfigError);
  CHECK(family(Method::kContextWsCng) == Family::kWsCng);
  CHECK(needs_composition(Method::kAugmentedHsCng));
  CHECK_FALSE(needs_recurrent(Method::kCharWs));
}

TEST_CASE("recurrent classifier separates marker classes") {
  const auto c = make_corpus(90, 1);
  const auto vocab = text::WordVocab::build(c.texts);
  auto cfg = small_training();
  cfg.validation_fraction = 0.1;
  const auto m = train_recurrent(c.docs, c.labels, 3, vocab,
                                 embed::random_table(vocab, 8, 1), cfg);
  std::vector<std::vector<double>> dists;
  for (const auto& d : c.docs) {
    dists.push_back(m.distribution(word_inputs(m.embeddings, vocab, d)));
    CHECK(std::accumulate(dists.back().begin(), dists.back().end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK(accuracy(dists, c.labels) >= 0.95);
  CHECK_FALSE(m.history.empty());
  CHECK(m.history.size() <= cfg.max_epochs);
  CHECK(m.embeddings.provenance[*vocab.find("zorp")] == embed::Provenance::kTaskTuned);
}

TEST_CASE("recurrent training errors") {
  const auto c = make_corpus(12, 2);
  const auto vocab = text::WordVocab::build(c.texts);
  std::vector<std::size_t> one(12, 1);
  CHECK_THROWS_AS(train_recurrent(c.docs, one, 3, vocab, embed::random_table(vocab, 4, 1),
                                  small_training()),
                  InvalidInputError);
  auto bad = small_training();
  bad.learning_rate = 1e30;
  CHECK_THROWS_AS(train_recurrent(c.docs, c.labels, 3, vocab,
                                  embed::random_table(vocab, 4, 1), bad),
                  TrainingError);
  bad = small_training();
  bad.hidden = 0;
  CHECK_THROWS_AS(validate(bad), InvalidConfigError);
}

TEST_CASE("word-sum features") {
  const auto c = make_corpus(6, 3);
  const auto vocab = text::WordVocab::build(c.texts);
  const auto table = embed::random_table(vocab, 6, 4);
  std::vector<std::string> toks{"river", "zorp", "unseenword"};
  const auto a = ws_feature(table, vocab, toks);
  std::reverse(toks.begin(), toks.end());
  const auto b = ws_feature(table, vocab, toks);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6));
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-6));

  const std::vector<std::string> single{"river"};
  const auto s = ws_feature(table, vocab, single);
  const auto row = table.row(*vocab.find("river"));
  const double n = norm(row);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == doctest::Approx(row[i] / n).epsilon(1e-6));

  const auto empty = ws_feature(table, vocab, std::vector<std::string>{});
  CHECK(empty == std::vector<float>(6, 0.0f));

  const auto oov = word_inputs(table, vocab, std::vector<std::string>{});
  CHECK(oov.rows == 1);
  CHECK(std::equal(oov.row(0).begin(), oov.row(0).end(), table.row(table.oov_row()).begin()));
}

TEST_CASE("one-hot characters") {
  const std::size_t ids[] = {0, 5, text::CharVocab::kSpace};
  const auto m = one_hot_chars(ids);
  CHECK(m.rows == 3);
  CHECK(m.cols == text::CharVocab::kSize);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(std::accumulate(m.row(r).begin(), m.row(r).end(), 0.0f) == 1.0f);
    CHECK(m(r, ids[r]) == 1.0f);
  }
  CHECK(one_hot_chars(ids) == m);
}

TEST_CASE("composition model learns spelling") {
  const auto [vocab, table] = spelled_table(60, 6);
  for (ComposerKind kind : {ComposerKind::kCnn, ComposerKind::kBiLstm}) {
    auto cfg = small_composition();
    cfg.kind = kind;
    cfg.max_epochs = 20;
    cfg.patience = 20;
    const auto m = train_composition(table, vocab, cfg);
    REQUIRE(m.history.size() >= 2);
    CHECK(m.history.back().train_loss < m.history.front().train_loss);
    CHECK(m.dim() == 6);
    CHECK(m.input_dim() == text::CharVocab::kSize);

    const auto again = train_composition(table, vocab, cfg);
    CHECK(compose(m, "a5sh0les") == compose(again, "a5sh0les"));
    CHECK(compose(m, "a5sh0les").size() == 6);
    CHECK_THROWS_AS(compose(m, ""), InvalidInputError);
  }
}

TEST_CASE("composition rejects small vocabularies and bad configs") {
  const auto [vocab, table] = spelled_table(9, 4);
  CHECK_THROWS_AS(train_composition(table, vocab, small_composition()), InvalidInputError);
  auto bad = small_composition();
  bad.holdout_fraction = 1.0;
  CHECK_THROWS_AS(validate(bad), InvalidConfigError);
  bad = small_composition();
  bad.filter_widths.clear();
  CHECK_THROWS_AS(validate(bad), InvalidConfigError);
}

TEST_CASE("context encoder sees neighbouring text") {
  const auto c = make_corpus(30, 6);
  const auto vocab = text::WordVocab::build(c.texts);
  auto table = embed::random_table(vocab, 6, 3);
  auto cfg = small_composition();
  cfg.max_epochs = 6;
  cfg.patience = 6;
  const auto cm = train_context_encoder_joint(c.docs, table, vocab, cfg);
  REQUIRE(cm.composer.history.size() >= 2);
  CHECK(cm.composer.history.back().train_loss < cm.composer.history.front().train_loss);
  CHECK(cm.composer.context_mode);
  CHECK_THROWS_AS(compose(cm.composer, "zorp"), InvalidConfigError);

  // Changing a word two positions away changes the composed vector of
  // tokens[0].
  std::vector<std::string> a{"zorpy", "river", "house"};
  std::vector<std::string> b{"zorpy", "river", "garden"};
  CHECK(compose(cm, a, 0) != compose(cm, b, 0));
  CHECK(compose(cm, a, 0) == compose(cm, a, 0));
  CHECK_THROWS_AS(compose(cm, a, 3), InvalidInputError);
}

TEST_CASE("char-to-word classifier") {
  const auto c = make_corpus(60, 7);
  C2WConfig cfg;
  cfg.training = small_training();
  cfg.training.max_epochs = 60;
  cfg.training.patience = 10;
  cfg.char_hidden = 16;
  cfg.word_dim = 8;
  const auto m = train_c2w(c.docs, c.labels, 3, cfg);
  std::vector<std::vector<double>> dists;
  for (const auto& d : c.docs) dists.push_back(m.distribution(d));
  CHECK(accuracy(dists, c.labels) >= 0.9);
  CHECK(m.word_embeddings(c.docs[0]).rows == c.docs[0].size());
  CHECK(m.word_embeddings(std::vector<std::string>{}).rows == 1);
}

TEST_CASE("pipeline feature bundles") {
  const auto c = make_corpus(45, 8);
  const std::vector<Method> ms{Method::kHsCng, Method::kAugmentedHsCng, Method::kWs,
                               Method::kWsCng, Method::kAugmentedWsCng};
  const auto comps = train_components(ms, c.texts, c.labels, 3, small_pipeline());
  REQUIRE(comps.recurrent);
  REQUIRE(comps.ngrams);
  REQUIRE(comps.composition);
  CHECK_FALSE(comps.c2w);
  CHECK_FALSE(comps.context);
  CHECK(comps.gbdt.size() == 3);

  const auto& t = c.texts[0];
  const auto hs = build_feature_bundle(Method::kHsCng, t, comps);
  CHECK(hs.base_length == 16);
  CHECK(hs.values.size() == 16 + comps.ngrams->columns());

  // Every word seen in training: composition never kicks in.
  for (const auto& text : c.texts) {
    CHECK(build_feature_bundle(Method::kAugmentedWsCng, text, comps).values ==
          build_feature_bundle(Method::kWsCng, text, comps).values);
    CHECK(build_feature_bundle(Method::kAugmentedHsCng, text, comps).values ==
          build_feature_bundle(Method::kHsCng, text, comps).values);
  }

  // An unseen word takes its composed vector.
  const auto unseen = text::normalize_and_tokenize("z0rpy river", text::default_stopwords());
  const auto plain = method_word_inputs(Method::kWsCng, comps, unseen.tokens);
  const auto aug = method_word_inputs(Method::kAugmentedWsCng, comps, unseen.tokens);
  CHECK(aug.row(0)[0] == doctest::Approx(compose(*comps.composition, "z0rpy")[0]));
  CHECK(std::equal(aug.row(1).begin(), aug.row(1).end(), plain.row(1).begin()));

  const auto empty = text::normalize_and_tokenize("", text::default_stopwords());
  for (Method m : ms) {
    for (const auto* txt : {&t, &unseen, &empty}) {
      const auto p = predict(m, comps, *txt);
      CHECK(p.size() == 3);
      CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  const auto ws_empty = build_feature_bundle(Method::kWs, empty, comps);
  CHECK(std::all_of(ws_empty.values.begin(), ws_empty.values.end(),
                    [](double v) { return v == 0.0; }));

  CHECK_THROWS_AS(predict(Method::kCharWs, comps, t), InvalidConfigError);
  CHECK_THROWS_AS(predict(Method::kContextWsCng, comps, t), InvalidConfigError);
  Components bare = comps;
  bare.composition.reset();
  CHECK_THROWS_AS(build_feature_bundle(Method::kAugmentedWsCng, unseen, bare),
                  InvalidConfigError);
  CHECK_THROWS_AS(build_feature_bundle(Method::kCharHs, t, comps), InvalidConfigError);
}

TEST_CASE("pipeline is deterministic per seed") {
  const auto c = make_corpus(30, 9);
  const std::vector<Method> ms{Method::kHs, Method::kCharWs, Method::kContextWsCng};
  const auto a = train_components(ms, c.texts, c.labels, 3, small_pipeline());
  const auto b = train_components(ms, c.texts, c.labels, 3, small_pipeline());
  const auto probe = text::normalize_and_tokenize("qu4v garden", text::default_stopwords());
  for (Method m : ms) CHECK(predict(m, a, probe) == predict(m, b, probe));
  CHECK(a.c2w->word_dim() == 8);
}
