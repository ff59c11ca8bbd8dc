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

// Text normalization, vocabularies, character encoding and character
// n-gram featurization.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace oovc::text {

using StopwordSet = std::unordered_set<std::string>;

// Built-in English function-word list (same content as data/stopwords.txt).
const StopwordSet& default_stopwords();

// One token per line; blank lines and lines starting with '#' are skipped.
StopwordSet load_stopwords(const std::string& path);
StopwordSet parse_stopwords(std::string_view contents);

struct NormalizedText {
  std::string original;
  std::string normalized;  // tokens joined by single spaces
  std::vector<std::string> tokens;
};

// Lowercases ASCII letters, splits on whitespace, strips leading/trailing
// punctuation from every token (keeping '*', '#', '@' and anything inside
// the token), then drops stopwords.
NormalizedText normalize_and_tokenize(std::string_view text,
                                      const StopwordSet& stopwords);

std::string join_tokens(std::span<const std::string> tokens);

// -------------------------------------------------------------- word vocab

class WordVocab {
 public:
  // Every token of the corpus, no frequency cutoff, indices in first-seen
  // order. Throws InvalidInputError on a corpus without tokens.
  static WordVocab build(std::span<const NormalizedText> corpus);
  static WordVocab build(std::span<const std::vector<std::string>> corpus);

  // Restores a vocabulary from (word, frequency) pairs in index order.
  static WordVocab from_entries(std::vector<std::string> words,
                                std::vector<std::uint64_t> frequencies);

  std::size_t size() const { return words_.size(); }
  // Reserved index one past the last word.
  std::size_t oov_index() const { return words_.size(); }
  std::size_t rows() const { return words_.size() + 1; }

  std::optional<std::size_t> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  // Index of `word`, or the OOV index for unseen words.
  std::size_t encode(std::string_view word) const;
  std::vector<std::size_t> encode(std::span<const std::string> tokens) const;

  const std::string& word(std::size_t index) const { return words_.at(index); }
  std::uint64_t frequency(std::size_t index) const { return freq_.at(index); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& frequencies() const { return freq_; }

  bool operator==(const WordVocab& o) const {
    return words_ == o.words_ && freq_ == o.freq_;
  }

 private:
  void add(const std::string& word, std::uint64_t count);

  std::vector<std::string> words_;
  std::vector<std::uint64_t> freq_;
  std::unordered_map<std::string, std::size_t> index_;
};

// -------------------------------------------------------------- char vocab

// Fixed alphabet: a-z, 0-9, space, plus one unknown-character index.
class CharVocab {
 public:
  static constexpr std::size_t kLetters = 26;
  static constexpr std::size_t kDigits = 10;
  static constexpr std::size_t kSpace = kLetters + kDigits;  // 36
  static constexpr std::size_t kUnknown = kSpace + 1;        // 37
  static constexpr std::size_t kSize = kUnknown + 1;         // 38

  static std::size_t index(char32_t c);
  // '?' for the unknown index.
  static char symbol(std::size_t index);
};

struct CharSpan {
  std::size_t begin;  // 0-based, inclusive
  std::size_t end;    // exclusive
  bool operator==(const CharSpan&) const = default;
};

struct CharSequence {
  std::vector<std::size_t> ids;
  std::vector<CharSpan> spans;  // one per token when encoding whole texts
};

// UTF-8 aware: one index per code point, anything outside a-z0-9 and space
// becomes the unknown index.
CharSequence encode_chars(std::string_view token);
CharSequence encode_text_chars(std::span<const std::string> tokens);
std::string decode_chars(std::span<const std::size_t> ids);

// ----------------------------------------------------------- char n-grams

enum class NgramMode { kTextWide, kPerToken };

struct NgramConfig {
  std::size_t n_min = 1;
  std::size_t n_max = 4;
  NgramMode mode = NgramMode::kTextWide;
  std::size_t min_count = 1;
};

class NgramVectorizer {
 public:
  // Columns are every n-gram seen in `texts` (normalized strings), in
  // first-seen order, restricted to those with at least min_count
  // occurrences. Throws InvalidConfigError on a bad range.
  static NgramVectorizer fit(std::span<const std::string> texts,
                             const NgramConfig& config);
  static NgramVectorizer from_columns(const NgramConfig& config,
                                      std::vector<std::string> columns);

  std::size_t columns() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }
  std::optional<std::size_t> column(std::string_view ngram) const;
  const NgramConfig& config() const { return config_; }

  // Raw per-column counts; n-grams without a column are ignored.
  std::vector<double> counts(std::string_view normalized) const;
  // counts() followed by L2 normalization.
  std::vector<double> transform(std::string_view normalized) const;

  bool operator==(const NgramVectorizer& o) const {
    return names_ == o.names_ && config_.n_min == o.config_.n_min &&
           config_.n_max == o.config_.n_max && config_.mode == o.config_.mode;
  }

 private:
  template <typename Fn>
  void for_each_ngram(std::string_view s, Fn&& fn) const;

  NgramConfig config_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

void validate(const NgramConfig& config);

}  // namespace oovc::text
