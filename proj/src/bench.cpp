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

#include "oovc/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <unordered_set>

#include "oovc/error.hpp"

namespace oovc::bench {

using Rng = std::mt19937_64;

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kLeet: return "leet-substitute";
    case OpKind::kRepeatChar: return "repeat-char";
    case OpKind::kMaskChar: return "mask-char";
    case OpKind::kConcatenate: return "concatenate";
    case OpKind::kTruncateVowel: return "truncate-vowel";
  }
  return "?";
}

const std::map<char, std::string>& default_leet_map() {
  static const std::map<char, std::string> m{
      {'o', "0"}, {'e', "3"}, {'i', "1"}, {'s', "5"}, {'a', "@4"}, {'t', "7"}};
  return m;
}

ObfuscationOp ObfuscationOp::leet_op(std::map<char, std::string> map, bool all) {
  ObfuscationOp op;
  op.kind = OpKind::kLeet;
  op.leet = std::move(map);
  op.all_positions = all;
  return op;
}

ObfuscationOp ObfuscationOp::concatenate(std::string partner) {
  ObfuscationOp op;
  op.kind = OpKind::kConcatenate;
  op.partner = std::move(partner);
  return op;
}

ObfuscationOp ObfuscationOp::of(OpKind kind) {
  ObfuscationOp op;
  op.kind = kind;
  return op;
}

namespace {

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Random nonempty subset of `eligible` (each kept with probability 1/2).
std::vector<std::size_t> subset(Rng& rng, const std::vector<std::size_t>& eligible) {
  std::bernoulli_distribution coin(0.5);
  for (;;) {
    std::vector<std::size_t> out;
    for (std::size_t p : eligible) {
      if (coin(rng)) out.push_back(p);
    }
    if (!out.empty()) return out;
  }
}

std::optional<std::string> apply(const ObfuscationOp& op, std::string w, Rng& rng) {
  switch (op.kind) {
    case OpKind::kLeet: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const auto it = op.leet.find(w[i]);
        if (it != op.leet.end() && !it->second.empty()) eligible.push_back(i);
      }
      if (eligible.empty()) return std::nullopt;
      const auto chosen = op.all_positions ? eligible : subset(rng, eligible);
      for (std::size_t p : chosen) {
        const std::string& options = op.leet.at(w[p]);
        w[p] = options[pick(rng, options.size())];
      }
      return w;
    }
    case OpKind::kRepeatChar: {
      if (op.repeat == 0) return std::nullopt;
      const std::size_t p = pick(rng, w.size());
      w.insert(p, op.repeat, w[p]);
      return w;
    }
    case OpKind::kMaskChar: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 1; i + 1 < w.size(); ++i) {
        if (w[i] != op.mask) eligible.push_back(i);
      }
      if (eligible.empty()) return std::nullopt;
      if (op.all_positions) {
        for (std::size_t p : eligible) w[p] = op.mask;
      } else {
        w[eligible[pick(rng, eligible.size())]] = op.mask;
      }
      return w;
    }
    case OpKind::kConcatenate:
      if (op.partner.empty()) return std::nullopt;
      return w + op.partner;
    case OpKind::kTruncateVowel: {
      std::vector<std::size_t> eligible;
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (is_vowel(w[i])) eligible.push_back(i);
      }
      if (eligible.empty()) return std::nullopt;
      w.erase(eligible[pick(rng, eligible.size())], 1);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

Obfuscated obfuscate(std::string_view word, const std::vector<ObfuscationOp>& ops,
                     std::uint64_t seed) {
  if (word.empty()) throw InvalidInputError("cannot obfuscate an empty word");
  Rng rng(seed);
  for (const auto& op : ops) {
    auto out = apply(op, std::string(word), rng);
    if (out && *out != word) return {std::move(*out), true, op.kind};
  }
  return {std::string(word), false, std::nullopt};
}

std::vector<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open word list " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    out.push_back(line);
  }
  return out;
}

const std::vector<std::string>& default_filler_words() {
  static const std::vector<std::string> words =
      load_word_list(std::string(OOVC_DATA_DIR) + "/filler_words.txt");
  return words;
}

std::vector<std::vector<std::string>> generate_markers(
    std::size_t classes, std::size_t stems_per_class,
    const std::vector<std::string>& suffixes, const std::vector<std::string>& avoid,
    std::uint64_t seed) {
  static const std::string consonants = "bcdfgklmnprstvz";
  static const std::string vowels = "aeiou";
  if (suffixes.empty()) throw InvalidConfigError("marker suffix list is empty");
  std::unordered_set<std::string> used(avoid.begin(), avoid.end());
  Rng rng(seed);
  std::vector<std::vector<std::string>> stems(classes);
  for (auto& cls : stems) {
    while (cls.size() < stems_per_class) {
      std::string w;
      const std::size_t syllables = 2 + pick(rng, 2);
      for (std::size_t s = 0; s < syllables; ++s) {
        w += consonants[pick(rng, consonants.size())];
        w += vowels[pick(rng, vowels.size())];
        if (pick(rng, 3) == 0) w += consonants[pick(rng, consonants.size())];
      }
      std::vector<std::string> forms;
      for (const auto& suf : suffixes) forms.push_back(w + suf);
      const bool clash = std::any_of(forms.begin(), forms.end(), [&](const std::string& f) {
        return used.count(f) || text::default_stopwords().count(f);
      });
      if (clash) continue;
      used.insert(forms.begin(), forms.end());
      cls.push_back(w);
    }
  }
  // Suffix-major: every bare stem comes before any inflected form.
  std::vector<std::vector<std::string>> out(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    for (const auto& suf : suffixes) {
      for (const auto& st : stems[c]) out[c].push_back(st + suf);
    }
  }
  return out;
}

void validate(const CorpusSpec& s) {
  if (s.classes < 2) throw InvalidConfigError("corpus needs at least two classes");
  if (!(s.obfuscation_rate >= 0.0 && s.obfuscation_rate <= 1.0)) {
    throw InvalidConfigError("obfuscation rate must lie in [0, 1]");
  }
  if (s.doc_min_words > s.doc_max_words || s.doc_min_markers == 0 ||
      s.doc_min_markers > s.doc_max_markers) {
    throw InvalidConfigError("document length ranges are inconsistent");
  }
  if (s.train_size < s.classes || s.test_size == 0) {
    throw InvalidConfigError("train/test sizes are too small");
  }
  if (!s.markers.empty() && s.markers.size() != s.classes) {
    throw InvalidConfigError("one marker lexicon per class is required");
  }
  if (!s.class_names.empty() && s.class_names.size() != s.classes) {
    throw InvalidConfigError("one class name per class is required");
  }
  if (s.markers.empty() && (s.stems_per_class == 0 || s.suffixes.empty())) {
    throw InvalidConfigError("marker generation needs stems and suffixes");
  }
  if (!(s.marker_zipf >= 0.0)) throw InvalidConfigError("marker Zipf exponent must be >= 0");
  if (s.ops.empty()) throw InvalidConfigError("at least one obfuscation op is required");
}

namespace {

bool stable_token(const std::string& tok) {
  const auto n = text::normalize_and_tokenize(tok, text::default_stopwords());
  return n.tokens.size() == 1 && n.tokens[0] == tok;
}

}  // namespace

Corpus generate_corpus(const CorpusSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  std::vector<std::string> filler = spec.filler.empty() ? default_filler_words() : spec.filler;
  std::shuffle(filler.begin(), filler.end(), rng);
  if (spec.filler_vocab != 0 && spec.filler_vocab < filler.size()) {
    filler.resize(spec.filler_vocab);
  }
  if (filler.empty()) throw InvalidConfigError("filler lexicon is empty");

  Corpus corpus;
  corpus.markers = spec.markers.empty()
                       ? generate_markers(spec.classes, spec.stems_per_class, spec.suffixes,
                                          filler, spec.seed + 7919)
                       : spec.markers;
  std::set<std::string> seen(filler.begin(), filler.end());
  for (const auto& lex : corpus.markers) {
    if (lex.empty()) throw InvalidConfigError("empty marker lexicon");
    for (const auto& m : lex) {
      if (!seen.insert(m).second) {
        throw InvalidConfigError("marker '" + m +
                                 "' appears in two lexicons or in the filler list");
      }
      if (!stable_token(m)) {
        throw InvalidConfigError("marker '" + m + "' is not a plain lowercase token");
      }
    }
  }
  corpus.class_names = spec.class_names;
  for (std::size_t c = corpus.class_names.size(); c < spec.classes; ++c) {
    corpus.class_names.push_back("class" + std::to_string(c));
  }

  auto make_labels = [&](std::size_t n) {
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i % spec.classes;
    std::shuffle(labels.begin(), labels.end(), rng);
    return labels;
  };
  std::vector<std::discrete_distribution<std::size_t>> marker_draw;
  for (const auto& lex : corpus.markers) {
    std::vector<double> w(lex.size());
    for (std::size_t r = 0; r < w.size(); ++r) {
      w[r] = std::pow(static_cast<double>(r + 1), -spec.marker_zipf);
    }
    marker_draw.emplace_back(w.begin(), w.end());
  }
  auto range = [&](std::size_t lo, std::size_t hi) { return lo + pick(rng, hi - lo + 1); };

  // Tokens of one document: filler plus markers at random positions; the
  // second vector flags marker positions. Test documents only use words seen
  // in training, so obfuscation is the sole source of unseen tokens.
  std::unordered_set<std::string> train_vocab;
  std::vector<std::string> seen_filler;
  auto draw = [&](std::size_t label, bool test) {
    const auto& words = test ? seen_filler : filler;
    std::vector<std::string> tokens;
    const std::size_t nf = range(spec.doc_min_words, spec.doc_max_words);
    for (std::size_t i = 0; i < nf && !words.empty(); ++i) {
      tokens.push_back(words[pick(rng, words.size())]);
    }
    std::vector<char> marker(tokens.size(), 0);
    const std::size_t nm = range(spec.doc_min_markers, spec.doc_max_markers);
    const auto& lex = corpus.markers[label];
    for (std::size_t i = 0; i < nm; ++i) {
      const std::size_t at = pick(rng, tokens.size() + 1);
      std::string m = lex[marker_draw[label](rng)];
      while (test && !train_vocab.count(m)) m = lex[marker_draw[label](rng)];
      tokens.insert(tokens.begin() + at, m);
      marker.insert(marker.begin() + at, 1);
    }
    return std::make_pair(tokens, marker);
  };

  const auto train_labels = make_labels(spec.train_size);
  for (std::size_t i = 0; i < spec.train_size; ++i) {
    auto [tokens, marker] = draw(train_labels[i], false);
    for (const auto& t : tokens) train_vocab.insert(t);
    Document d;
    d.id = "train-" + std::to_string(i + 1);
    d.label = train_labels[i];
    d.text = text::join_tokens(tokens);
    d.provenance.assign(tokens.size(), "-");
    corpus.train.push_back(std::move(d));
  }

  for (const auto& w : filler) {
    if (train_vocab.count(w)) seen_filler.push_back(w);
  }
  std::bernoulli_distribution obf(spec.obfuscation_rate);
  const auto test_labels = make_labels(spec.test_size);
  for (std::size_t i = 0; i < spec.test_size; ++i) {
    const std::size_t label = test_labels[i];
    auto [tokens, marker] = draw(label, true);
    Document d;
    d.id = "test-" + std::to_string(i + 1);
    d.label = label;
    d.provenance.assign(tokens.size(), "-");
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      if (!marker[t] || !obf(rng)) continue;
      const std::string base = tokens[t];
      const auto& lex = corpus.markers[label];
      bool done = false;
      for (int attempt = 0; attempt < 64 && !done; ++attempt) {
        // Chosen op first, the others as fallbacks.
        std::vector<ObfuscationOp> ops;
        const std::size_t first = pick(rng, spec.ops.size());
        for (std::size_t k = 0; k < spec.ops.size(); ++k) {
          const OpKind kind = spec.ops[(first + k) % spec.ops.size()];
          ops.push_back(kind == OpKind::kConcatenate
                            ? ObfuscationOp::concatenate(lex[pick(rng, lex.size())])
                            : ObfuscationOp::of(kind));
        }
        const auto r = obfuscate(base, ops, rng());
        if (r.obfuscated && !train_vocab.count(r.word) && stable_token(r.word)) {
          tokens[t] = r.word;
          d.provenance[t] = base;
          done = true;
        }
      }
      if (!done) {
        throw InvalidConfigError("could not obfuscate marker '" + base +
                                 "' into an unseen token");
      }
    }
    d.text = text::join_tokens(tokens);
    corpus.test.push_back(std::move(d));
  }

  if (spec.obfuscation_rate == 1.0) {
    for (const auto& d : corpus.test) {
      const auto n = text::normalize_and_tokenize(d.text, text::default_stopwords());
      for (std::size_t t = 0; t < n.tokens.size(); ++t) {
        if (d.provenance[t] != "-" && train_vocab.count(n.tokens[t])) {
          throw InvalidInputError("obfuscated test marker '" + n.tokens[t] +
                                  "' occurs in the training vocabulary");
        }
      }
    }
  }
  return corpus;
}

BenchConfig desk_config() {
  BenchConfig c;
  auto& p = c.pipeline;
  p.embedding_dim = 32;
  p.recurrent.hidden = 128;
  p.recurrent.max_epochs = 30;
  p.c2w.training = p.recurrent;
  p.c2w.char_hidden = 32;
  p.composition.kind = models::ComposerKind::kBiLstm;
  p.composition.hidden = 128;
  p.composition.tanh_hidden = 256;
  p.composition.encoder_hidden = 32;
  p.composition.max_epochs = 40;
  p.gbdt.rounds = 100;
  p.gbdt.max_depth = 3;
  p.gbdt.min_leaf = 5;
  p.gbdt.learning_rate = 0.1;
  return c;
}

CompositionStats composition_stats(const models::Components& c, const Corpus& corpus) {
  if (!c.composition || !c.recurrent) {
    throw InvalidConfigError("composition statistics need a composition model");
  }
  CompositionStats s;
  const auto& table = c.recurrent->embeddings;
  const auto oov = table.row(table.oov_row());
  for (const auto& d : corpus.test) {
    const auto n = text::normalize_and_tokenize(d.text, text::default_stopwords());
    for (std::size_t t = 0; t < n.tokens.size() && t < d.provenance.size(); ++t) {
      if (d.provenance[t] == "-") continue;
      const auto base = c.vocab.find(d.provenance[t]);
      if (!base || c.vocab.contains(n.tokens[t])) continue;
      const auto target = table.row(*base);
      const auto composed = models::compose(*c.composition, n.tokens[t]);
      const double cc = embed::cosine(composed, target);
      const double co = embed::cosine(oov, target);
      ++s.tokens;
      s.improved += cc > co;
      s.mean_composed_cosine += cc;
      s.mean_oov_cosine += co;
    }
  }
  if (s.tokens) {
    s.mean_composed_cosine /= static_cast<double>(s.tokens);
    s.mean_oov_cosine /= static_cast<double>(s.tokens);
  }
  return s;
}

BenchResult run_benchmark(const std::vector<models::Method>& methods,
                          const CorpusSpec& spec, const BenchConfig& config) {
  if (methods.empty()) throw InvalidConfigError("benchmark needs at least one method");
  if (config.repeats == 0) throw InvalidConfigError("benchmark needs at least one repeat");
  BenchResult result;
  std::vector<std::vector<eval::MetricsReport>> reports(methods.size());
  CompositionStats comp_total;
  bool have_comp = false;
  for (std::size_t r = 0; r < config.repeats; ++r) {
    CorpusSpec s = spec;
    s.seed = config.base_seed + r;
    const Corpus corpus = generate_corpus(s);
    std::vector<text::NormalizedText> train;
    std::vector<std::size_t> labels;
    for (const auto& d : corpus.train) {
      train.push_back(text::normalize_and_tokenize(d.text, text::default_stopwords()));
      labels.push_back(d.label);
    }
    models::PipelineConfig pc = config.pipeline;
    pc.seed = s.seed;
    const auto comps = models::train_components(methods, train, labels, spec.classes, pc);
    std::vector<std::size_t> gold;
    std::vector<text::NormalizedText> test;
    for (const auto& d : corpus.test) {
      test.push_back(text::normalize_and_tokenize(d.text, text::default_stopwords()));
      gold.push_back(d.label);
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
      std::vector<std::size_t> pred;
      for (const auto& t : test) {
        const auto p = models::predict(methods[m], comps, t);
        pred.push_back(std::max_element(p.begin(), p.end()) - p.begin());
      }
      reports[m].push_back(eval::compute_metrics(gold, pred, spec.classes));
    }
    if (comps.composition) {
      const auto cs = composition_stats(comps, corpus);
      comp_total.tokens += cs.tokens;
      comp_total.improved += cs.improved;
      comp_total.mean_composed_cosine += cs.mean_composed_cosine * cs.tokens;
      comp_total.mean_oov_cosine += cs.mean_oov_cosine * cs.tokens;
      have_comp = true;
    }
  }
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodResult mr;
    mr.method = methods[m];
    mr.mean = eval::average_reports(reports[m]);
    mr.seed_scores = mr.mean.fold_scores;
    result.methods.push_back(std::move(mr));
  }
  if (config.repeats >= 2) {
    for (std::size_t a = 0; a < methods.size(); ++a) {
      for (std::size_t b = a + 1; b < methods.size(); ++b) {
        PairTest pt;
        pt.a = methods[a];
        pt.b = methods[b];
        pt.mean_difference =
            result.methods[a].mean.macro_f1 - result.methods[b].mean.macro_f1;
        pt.test = eval::paired_t_test(result.methods[a].seed_scores,
                                      result.methods[b].seed_scores);
        result.pairs.push_back(pt);
      }
    }
  }
  if (have_comp) {
    if (comp_total.tokens) {
      comp_total.mean_composed_cosine /= static_cast<double>(comp_total.tokens);
      comp_total.mean_oov_cosine /= static_cast<double>(comp_total.tokens);
    }
    result.composition = comp_total;
  }
  return result;
}

}  // namespace oovc::bench
