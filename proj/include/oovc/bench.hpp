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

// Synthetic corpora with planted class markers whose test-split occurrences
// are deliberately obfuscated, and a benchmark that compares methods on them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oovc/evaluation.hpp"
#include "oovc/models.hpp"

namespace oovc::bench {

enum class OpKind : std::uint32_t {
  kLeet = 0,
  kRepeatChar,
  kMaskChar,
  kConcatenate,
  kTruncateVowel,
};

const char* to_string(OpKind kind);

// Default substitutions; 'a' picks one of its two replacements at random.
const std::map<char, std::string>& default_leet_map();

struct ObfuscationOp {
  OpKind kind = OpKind::kLeet;
  std::map<char, std::string> leet = default_leet_map();
  bool all_positions = false;  // leet/mask: every eligible position
  std::size_t repeat = 2;      // extra copies for repeat-char
  char mask = '*';
  std::string partner;  // concatenate appends this word

  static ObfuscationOp leet_op(std::map<char, std::string> map, bool all = false);
  static ObfuscationOp concatenate(std::string partner);
  static ObfuscationOp of(OpKind kind);
};

struct Obfuscated {
  std::string word;
  bool obfuscated = false;
  std::optional<OpKind> applied;
};

// Tries the ops in order and applies the first one with an eligible position
// (a random nonempty subset of positions unless all_positions is set). The
// result differs from the input whenever an op applies. Deterministic in
// `seed`. Throws InvalidInputError for an empty word.
Obfuscated obfuscate(std::string_view word, const std::vector<ObfuscationOp>& ops,
                     std::uint64_t seed);

// Fixed word list shipped in data/filler_words.txt.
std::vector<std::string> load_word_list(const std::string& path);
const std::vector<std::string>& default_filler_words();

struct CorpusSpec {
  std::size_t classes = 3;
  std::vector<std::string> class_names;     // default class0, class1, ...
  std::vector<std::vector<std::string>> markers;  // generated when empty
  // Generated markers are stem + suffix: class-specific stems, shared
  // suffixes. Lexicon order is suffix-major; draws follow a Zipf law over it.
  std::size_t stems_per_class = 4;
  std::vector<std::string> suffixes{"", "s", "er", "ing", "y", "ed", "ers", "ish"};
  double marker_zipf = 1.0;  // 0 = uniform
  std::vector<std::string> filler;  // default_filler_words() when empty
  std::size_t filler_vocab = 400;   // filler words actually used
  std::size_t doc_min_words = 6;
  std::size_t doc_max_words = 12;
  std::size_t doc_min_markers = 1;
  std::size_t doc_max_markers = 2;
  std::size_t train_size = 300;
  std::size_t test_size = 200;
  double obfuscation_rate = 0.8;  // test split only
  std::vector<OpKind> ops{OpKind::kLeet, OpKind::kRepeatChar, OpKind::kMaskChar,
                          OpKind::kTruncateVowel, OpKind::kConcatenate};
  std::uint64_t seed = 1;
};

void validate(const CorpusSpec& spec);

struct Document {
  std::string id;
  std::size_t label = 0;
  std::string text;  // tokens joined by spaces, already lowercase
  // Per token: the base marker an obfuscated token came from, "-" otherwise.
  std::vector<std::string> provenance;
};

struct Corpus {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::string>> markers;
  std::vector<Document> train;
  std::vector<Document> test;
};

// Throws InvalidConfigError when marker lexicons overlap each other or the
// filler list.
Corpus generate_corpus(const CorpusSpec& spec);

// Pronounceable pseudo-word stems with every suffix attached; no generated
// word is in `avoid` or a stopword.
std::vector<std::vector<std::string>> generate_markers(
    std::size_t classes, std::size_t stems_per_class,
    const std::vector<std::string>& suffixes, const std::vector<std::string>& avoid,
    std::uint64_t seed);

struct BenchConfig {
  models::PipelineConfig pipeline;
  std::size_t repeats = 5;  // seeds base_seed, base_seed + 1, ...
  std::uint64_t base_seed = 1;
};

// Settings sized for a single desktop core: 32-d random-init embeddings,
// a 128-unit GRU and a reduced composition model.
BenchConfig desk_config();

struct MethodResult {
  models::Method method;
  eval::MetricsReport mean;         // averaged over repeats
  std::vector<double> seed_scores;  // macro F1 per repeat
};

struct PairTest {
  models::Method a, b;
  double mean_difference = 0.0;  // macro F1 of a minus b
  eval::TTestResult test;
};

// Obfuscated test markers whose composed vector is closer (cosine) to the
// base word's tuned embedding than the shared OOV row is.
struct CompositionStats {
  std::size_t tokens = 0;
  std::size_t improved = 0;
  double mean_composed_cosine = 0.0;
  double mean_oov_cosine = 0.0;
};

struct BenchResult {
  std::vector<MethodResult> methods;  // in request order
  std::vector<PairTest> pairs;        // every ordered pair i < j
  std::optional<CompositionStats> composition;
};

BenchResult run_benchmark(const std::vector<models::Method>& methods,
                          const CorpusSpec& spec, const BenchConfig& config);

CompositionStats composition_stats(const models::Components& c, const Corpus& corpus);

}  // namespace oovc::bench
