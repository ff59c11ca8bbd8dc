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
#include <cctype>
#include <fstream>
#include <sstream>

#include "oovc/error.hpp"
#include "oovc/nn.hpp"
#include "oovc/text.hpp"

namespace oovc::text {

const StopwordSet& default_stopwords() {
  static const StopwordSet set{
    "a", "about", "above", "after", "again", "against", "all", "am", "an",
    "and", "any", "are", "as", "at", "be", "because", "been", "before",
    "being", "below", "between", "both", "but", "by", "can", "could", "did",
    "do", "does", "doing", "down", "during", "each", "few", "for", "from",
    "further", "had", "has", "have", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is",
    "it", "its", "itself", "just", "me", "more", "most", "my", "myself",
    "no", "nor", "not", "now", "of", "off", "on", "once", "only", "or",
    "other", "our", "ours", "ourselves", "out", "over", "own", "same", "she",
    "should", "so", "some", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those",
    "through", "to", "too", "under", "until", "up", "very", "was", "we",
    "were", "what", "when", "where", "which", "while", "who", "whom", "why",
    "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
  };
  return set;
}

StopwordSet parse_stopwords(std::string_view contents) {
  StopwordSet out;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string line(contents.substr(pos, nl - pos));
    pos = nl + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.pop_back();
    }
    std::size_t start = 0;
    while (start < line.size() &&
           std::isspace(static_cast<unsigned char>(line[start]))) {
      ++start;
    }
    line = line.substr(start);
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line) {
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    out.insert(line);
  }
  return out;
}

StopwordSet load_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open stopword file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_stopwords(ss.str());
}

namespace {

bool strippable(unsigned char c) {
  if (c >= 0x80) return false;
  if (c == '*' || c == '#' || c == '@') return false;
  return std::ispunct(c) != 0;
}

}  // namespace

NormalizedText normalize_and_tokenize(std::string_view text,
                                      const StopwordSet& stopwords) {
  NormalizedText out;
  out.original = std::string(text);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) {
      ++j;
    }
    if (j > i) {
      std::size_t b = i, e = j;
      while (b < e && strippable(static_cast<unsigned char>(text[b]))) ++b;
      while (e > b && strippable(static_cast<unsigned char>(text[e - 1]))) --e;
      if (e > b) {
        std::string tok(text.substr(b, e - b));
        for (auto& ch : tok) {
          const auto u = static_cast<unsigned char>(ch);
          if (u < 0x80) ch = static_cast<char>(std::tolower(u));
        }
        if (!stopwords.contains(tok)) out.tokens.push_back(std::move(tok));
      }
    }
    i = j;
  }
  out.normalized = join_tokens(out.tokens);
  return out;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string s;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) s.push_back(' ');
    s += tokens[i];
  }
  return s;
}

// ------------------------------------------------------------- WordVocab --

void WordVocab::add(const std::string& word, std::uint64_t count) {
  auto [it, inserted] = index_.emplace(word, words_.size());
  if (inserted) {
    words_.push_back(word);
    freq_.push_back(count);
  } else {
    freq_[it->second] += count;
  }
}

WordVocab WordVocab::build(std::span<const std::vector<std::string>> corpus) {
  WordVocab v;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) v.add(tok, 1);
  }
  if (v.words_.empty()) {
    throw InvalidInputError("cannot build a vocabulary from an empty corpus");
  }
  return v;
}

WordVocab WordVocab::build(std::span<const NormalizedText> corpus) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& t : corpus) docs.push_back(t.tokens);
  return build(std::span<const std::vector<std::string>>(docs));
}

WordVocab WordVocab::from_entries(std::vector<std::string> words,
                                  std::vector<std::uint64_t> frequencies) {
  if (words.size() != frequencies.size()) {
    throw FormatError("vocabulary word and frequency lists differ in length");
  }
  WordVocab v;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (v.index_.contains(words[i])) {
      throw FormatError("duplicate vocabulary entry: " + words[i]);
    }
    if (frequencies[i] == 0) {
      throw FormatError("vocabulary entry with zero frequency: " + words[i]);
    }
    v.add(words[i], frequencies[i]);
  }
  return v;
}

std::optional<std::size_t> WordVocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t WordVocab::encode(std::string_view word) const {
  return find(word).value_or(oov_index());
}

std::vector<std::size_t> WordVocab::encode(
    std::span<const std::string> tokens) const {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(encode(t));
  return ids;
}

// ------------------------------------------------------------- CharVocab --

std::size_t CharVocab::index(char32_t c) {
  if (c >= U'a' && c <= U'z') return static_cast<std::size_t>(c - U'a');
  if (c >= U'0' && c <= U'9') return kLetters + static_cast<std::size_t>(c - U'0');
  if (c == U' ') return kSpace;
  return kUnknown;
}

char CharVocab::symbol(std::size_t index) {
  if (index < kLetters) return static_cast<char>('a' + index);
  if (index < kSpace) return static_cast<char>('0' + (index - kLetters));
  if (index == kSpace) return ' ';
  return '?';
}

namespace {

// Decodes one code point; malformed bytes count as one code point each.
char32_t next_code_point(std::string_view s, std::size_t& i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  std::size_t len = 1;
  char32_t cp = b0;
  if (b0 >= 0xF0 && b0 < 0xF8) {
    len = 4;
    cp = b0 & 0x07;
  } else if (b0 >= 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if (b0 >= 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if (b0 >= 0x80) {
    ++i;
    return 0xFFFD;
  }
  if (len > 1) {
    if (i + len > s.size()) {
      ++i;
      return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ++i;
        return 0xFFFD;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
  }
  i += len;
  return cp;
}

}  // namespace

CharSequence encode_chars(std::string_view token) {
  CharSequence seq;
  for (std::size_t i = 0; i < token.size();) {
    seq.ids.push_back(CharVocab::index(next_code_point(token, i)));
  }
  return seq;
}

CharSequence encode_text_chars(std::span<const std::string> tokens) {
  CharSequence seq;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    if (t) seq.ids.push_back(CharVocab::kSpace);
    const std::size_t begin = seq.ids.size();
    auto word = encode_chars(tokens[t]);
    seq.ids.insert(seq.ids.end(), word.ids.begin(), word.ids.end());
    seq.spans.push_back({begin, seq.ids.size()});
  }
  return seq;
}

std::string decode_chars(std::span<const std::size_t> ids) {
  std::string s;
  s.reserve(ids.size());
  for (std::size_t id : ids) s.push_back(CharVocab::symbol(id));
  return s;
}

// ------------------------------------------------------- NgramVectorizer --

void validate(const NgramConfig& config) {
  if (config.n_min < 1 || config.n_min > config.n_max) {
    throw InvalidConfigError("n-gram range must satisfy 1 <= n_min <= n_max, got [" +
                             std::to_string(config.n_min) + ", " +
                             std::to_string(config.n_max) + "]");
  }
  if (config.min_count < 1) {
    throw InvalidConfigError("n-gram min_count must be at least 1");
  }
}

template <typename Fn>
void NgramVectorizer::for_each_ngram(std::string_view s, Fn&& fn) const {
  auto emit = [&](std::string_view part) {
    for (std::size_t n = config_.n_min; n <= config_.n_max; ++n) {
      if (n > part.size()) break;
      for (std::size_t p = 0; p + n <= part.size(); ++p) fn(part.substr(p, n));
    }
  };
  if (config_.mode == NgramMode::kTextWide) {
    emit(s);
    return;
  }
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ') ++j;
    if (j > i) emit(s.substr(i, j - i));
    i = j;
  }
}

NgramVectorizer NgramVectorizer::fit(std::span<const std::string> texts,
                                     const NgramConfig& config) {
  validate(config);
  NgramVectorizer v;
  v.config_ = config;
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : texts) {
    v.for_each_ngram(t, [&](std::string_view g) {
      auto [it, inserted] = counts.emplace(std::string(g), 0);
      if (inserted) order.push_back(it->first);
      ++it->second;
    });
  }
  for (auto& g : order) {
    if (counts[g] >= config.min_count) {
      v.index_.emplace(g, v.names_.size());
      v.names_.push_back(std::move(g));
    }
  }
  return v;
}

NgramVectorizer NgramVectorizer::from_columns(const NgramConfig& config,
                                              std::vector<std::string> columns) {
  validate(config);
  NgramVectorizer v;
  v.config_ = config;
  for (auto& g : columns) {
    if (g.size() < config.n_min || g.size() > config.n_max) {
      throw FormatError("n-gram column '" + g + "' outside the configured range");
    }
    if (!v.index_.emplace(g, v.names_.size()).second) {
      throw FormatError("duplicate n-gram column '" + g + "'");
    }
    v.names_.push_back(std::move(g));
  }
  return v;
}

std::optional<std::size_t> NgramVectorizer::column(std::string_view ngram) const {
  auto it = index_.find(std::string(ngram));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> NgramVectorizer::counts(std::string_view normalized) const {
  std::vector<double> out(names_.size(), 0.0);
  std::string key;
  for_each_ngram(normalized, [&](std::string_view g) {
    key.assign(g);
    auto it = index_.find(key);
    if (it != index_.end()) out[it->second] += 1.0;
  });
  return out;
}

std::vector<double> NgramVectorizer::transform(std::string_view normalized) const {
  auto c = counts(normalized);
  return nn::l2_normalize<double>(c);
}

}  // namespace oovc::text
