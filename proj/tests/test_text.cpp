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
#include <random>

#include "doctest.h"
#include "oovc/error.hpp"
#include "oovc/text.hpp"

using namespace oovc;
using namespace oovc::text;

TEST_CASE("normalize_and_tokenize") {
  StopwordSet you{"you"};
  CHECK(normalize_and_tokenize("You feminist Cnt!", you).tokens ==
        std::vector<std::string>{"feminist", "cnt"});
  StopwordSet are{"are"};
  CHECK(normalize_and_tokenize("w0m3n are a5sh0les", are).tokens ==
        std::vector<std::string>{"w0m3n", "a5sh0les"});
  CHECK(normalize_and_tokenize("", {}).tokens.empty());

  auto t = normalize_and_tokenize("  \"Hello,\" @Mention c*nt #MKR ... (ok) ",
                                  {});
  CHECK(t.tokens ==
        std::vector<std::string>{"hello", "@mention", "c*nt", "#mkr", "ok"});
  CHECK(t.normalized == "hello @mention c*nt #mkr ok");
  CHECK(normalize_and_tokenize("don't stop-words", {}).tokens ==
        std::vector<std::string>{"don't", "stop-words"});
  CHECK(normalize_and_tokenize("#stupidbitch!!", {}).tokens ==
        std::vector<std::string>{"#stupidbitch"});
}

TEST_CASE("normalized text has no uppercase and re-tokenizes to itself") {
  std::mt19937_64 rng(12);
  const std::string alphabet = "abcXYZ01*#@!?.,' \t-é";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    for (int i = 0; i < 30; ++i) s.push_back(alphabet[pick(rng)]);
    auto a = normalize_and_tokenize(s, {"abc"});
    for (char c : a.normalized) CHECK(!(c >= 'A' && c <= 'Z'));
    for (const auto& tok : a.tokens) CHECK(!tok.empty());
    auto b = normalize_and_tokenize(a.normalized, {"abc"});
    CHECK(b.tokens == a.tokens);
  }
}

TEST_CASE("stopword files") {
  auto s = parse_stopwords("# comment\nThe\n\n  and  \n#x\n");
  CHECK(s == StopwordSet{"the", "and"});
  CHECK_THROWS_AS(load_stopwords("/nonexistent/stop.txt"), FileError);
  CHECK(load_stopwords(std::string(OOVC_DATA_DIR) + "/stopwords.txt") ==
        default_stopwords());
  CHECK(default_stopwords().size() >= 100);
}

TEST_CASE("word vocabulary") {
  std::vector<std::vector<std::string>> corpus{{"a", "b"}, {"b"}};
  auto v = WordVocab::build(std::span<const std::vector<std::string>>(corpus));
  CHECK(v.size() == 2);
  CHECK(v.frequency(*v.find("a")) == 1);
  CHECK(v.frequency(*v.find("b")) == 2);
  CHECK(v.encode("c") == v.oov_index());
  CHECK(v.oov_index() == 2);
  CHECK(v.word(0) == "a");

  std::vector<std::vector<std::string>> empty{{}, {}};
  CHECK_THROWS_AS(
      WordVocab::build(std::span<const std::vector<std::string>>(empty)),
      InvalidInputError);

  auto r = WordVocab::from_entries(v.words(), v.frequencies());
  CHECK(r == v);
  CHECK_THROWS_AS(WordVocab::from_entries({"x", "x"}, {1, 1}), FormatError);
}

TEST_CASE("character encoding") {
  auto ab1 = encode_chars("ab1");
  CHECK(ab1.ids == std::vector<std::size_t>{CharVocab::index('a'),
                                            CharVocab::index('b'),
                                            CharVocab::index('1')});
  auto cnt = encode_chars("c*nt");
  CHECK(cnt.ids == std::vector<std::size_t>{2, CharVocab::kUnknown, 13, 19});
  CHECK(encode_chars("cnt").ids != std::vector<std::size_t>{2, 13, 19, 19});

  std::vector<std::string> toks{"cat", "sat"};
  auto seq = encode_text_chars(toks);
  // 1-based inclusive (1,3) and (5,7) around the space at position 4.
  CHECK(seq.spans == std::vector<CharSpan>{{0, 3}, {4, 7}});
  CHECK(seq.ids[3] == CharVocab::kSpace);
  CHECK(decode_chars(seq.ids) == "cat sat");

  CHECK(encode_chars("é").ids == std::vector<std::size_t>{CharVocab::kUnknown});
  CHECK(CharVocab::kSize == 38);
}

TEST_CASE("in-vocabulary strings decode back exactly") {
  std::mt19937_64 rng(3);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789 ";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::string s;
    for (int i = 0; i < 1 + trial % 20; ++i) s.push_back(alphabet[pick(rng)]);
    CHECK(decode_chars(encode_chars(s).ids) == s);
  }
}

TEST_CASE("n-gram vectorizer") {
  std::vector<std::string> aaa{"aaa"};
  auto v = NgramVectorizer::fit(aaa, {1, 2});
  CHECK(v.column_names() == std::vector<std::string>{"a", "aa"});
  CHECK(v.counts("aaa") == std::vector<double>{3, 2});
  auto t = v.transform("aaa");
  CHECK(t[0] == doctest::Approx(3 / std::sqrt(13.0)));
  CHECK(t[1] == doctest::Approx(2 / std::sqrt(13.0)));
  CHECK(v.transform("xyz") == std::vector<double>{0, 0});

  std::vector<std::string> abba{"ab ba"};
  CHECK(NgramVectorizer::fit(abba, {2, 2}).column_names() ==
        std::vector<std::string>{"ab", "b ", " b", "ba"});
  CHECK(NgramVectorizer::fit(abba, {2, 2, NgramMode::kPerToken})
            .column_names() == std::vector<std::string>{"ab", "ba"});

  CHECK_THROWS_AS(NgramVectorizer::fit(aaa, {0, 2}), InvalidConfigError);
  CHECK_THROWS_AS(NgramVectorizer::fit(aaa, {3, 2}), InvalidConfigError);

  std::vector<std::string> two{"ab", "abc"};
  auto mc = NgramVectorizer::fit(two, {1, 2, NgramMode::kTextWide, 2});
  CHECK(mc.column_names() == std::vector<std::string>{"a", "b", "ab"});
}

TEST_CASE("n-gram count and norm properties") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "abc d*1";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::string s;
    for (int i = 0; i < trial % 15; ++i) s.push_back(alphabet[pick(rng)]);
    std::vector<std::string> texts{s};
    auto v = NgramVectorizer::fit(texts, {1, 5});
    auto c = v.counts(s);
    for (std::size_t n = 1; n <= 5; ++n) {
      double total = 0;
      for (std::size_t k = 0; k < v.columns(); ++k) {
        if (v.column_names()[k].size() == n) total += c[k];
      }
      const double expect = s.size() >= n ? double(s.size() - n + 1) : 0.0;
      CHECK(total == expect);
    }
    auto t = v.transform(s);
    double sq = 0;
    for (double x : t) sq += x * x;
    if (!s.empty()) CHECK(std::abs(std::sqrt(sq) - 1.0) <= 1e-9);
    CHECK(NgramVectorizer::fit(texts, {1, 5}) == v);
  }
}
