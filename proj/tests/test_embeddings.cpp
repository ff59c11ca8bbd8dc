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

#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "oovc/embeddings.hpp"
#include "oovc/error.hpp"

using namespace oovc;
using namespace oovc::embed;
using oovc::text::WordVocab;

namespace {

WordVocab vocab_of(std::vector<std::string> words) {
  std::vector<std::vector<std::string>> docs{std::move(words)};
  return WordVocab::build(std::span<const std::vector<std::string>>(docs));
}

}  // namespace

TEST_CASE("load_pretrained") {
  auto v = vocab_of({"the", "cat", "zebra"});
  auto t = parse_pretrained("the 0.1 0.2\nunused 1 1\ncat -1 0.5\n", v, 3);
  CHECK(t.dim() == 2);
  CHECK(t.rows() == 4);
  CHECK(t.row(0)[0] == 0.1f);
  CHECK(t.row(0)[1] == 0.2f);
  CHECK(t.provenance[0] == Provenance::kPretrained);
  CHECK(t.provenance[1] == Provenance::kPretrained);
  CHECK(t.provenance[2] == Provenance::kRandomInit);
  CHECK(t.provenance[3] == Provenance::kRandomInit);
  for (std::size_t r : {2u, 3u}) {
    for (float x : t.row(r)) {
      CHECK(x >= -0.05f);
      CHECK(x <= 0.05f);
    }
  }
  CHECK(parse_pretrained("the 0.1 0.2\ncat 1 2\n", v, 3) ==
        parse_pretrained("the 0.1 0.2\ncat 1 2\n", v, 3));

  CHECK_THROWS_AS(parse_pretrained("the 0.1 0.2\ncat 1 2 3\n", v, 3),
                  FormatError);
  try {
    parse_pretrained("the 0.1 0.2\ncat 1 x\n", v, 3);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_pretrained("the 0.1 0.2\n", v, 3, 3), FormatError);
  CHECK_THROWS_AS(load_pretrained("/nonexistent.vec", v, 1), FileError);
}

TEST_CASE("lookup") {
  auto v = vocab_of({"cat", "dog"});
  auto t = random_table(v, 4, 1);
  CHECK(std::equal(lookup(t, v, "cat").begin(), lookup(t, v, "cat").end(),
                   t.row(0).begin()));
  CHECK(lookup(t, v, "zzqq").data() == t.row(t.oov_row()).data());
  auto a = lookup(t, v, "dog");
  auto b = lookup(t, v, "dog");
  CHECK(std::vector<float>(a.begin(), a.end()) ==
        std::vector<float>(b.begin(), b.end()));
}

TEST_CASE("nearest neighbors") {
  auto v = vocab_of({"x", "y", "xy", "negx"});
  EmbeddingTable t = random_table(v, 2, 1);
  auto& m = t.matrix();
  m(0, 0) = 1; m(0, 1) = 0;
  m(1, 0) = 0; m(1, 1) = 1;
  m(2, 0) = 1; m(2, 1) = 1;
  m(3, 0) = -1; m(3, 1) = 0;
  m(4, 0) = 1; m(4, 1) = 0;  // OOV identical to x, must never appear

  std::vector<float> q{1, 0};
  auto res = nearest_neighbors(t, v, q, 10);
  REQUIRE(res.size() == 4);
  CHECK(res[0].token == "x");
  CHECK(res[0].cosine == doctest::Approx(1.0));
  CHECK(res[1].token == "xy");
  CHECK(res[2].token == "y");
  CHECK(res[2].cosine == doctest::Approx(0.0));
  CHECK(res[3].token == "negx");

  auto self = nearest_neighbors(t, v, std::string_view("x"), 2);
  CHECK(self[0].token == "xy");

  // Ties ordered by vocabulary index.
  m(1, 0) = 1; m(1, 1) = 0;
  auto tied = nearest_neighbors(t, v, q, 2);
  CHECK(tied[0].token == "x");
  CHECK(tied[1].token == "y");

  std::vector<float> zero{0, 0};
  CHECK_THROWS_AS(nearest_neighbors(t, v, zero, 3), InvalidInputError);
  CHECK_THROWS_AS(nearest_neighbors(t, v, q, 0), InvalidInputError);
}

TEST_CASE("cosine is symmetric and bounded") {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> d;
  for (int i = 0; i < 200; ++i) {
    std::vector<float> a(5), b(5);
    for (auto& x : a) x = d(rng);
    for (auto& x : b) x = d(rng);
    const double ab = cosine(a, b), ba = cosine(b, a);
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("mark_tuned flips only listed rows") {
  auto v = vocab_of({"a", "b", "c"});
  auto t = parse_pretrained("a 1 2\n", v, 1);
  std::vector<std::size_t> rows{1};
  t.mark_tuned(rows);
  CHECK(t.provenance[0] == Provenance::kPretrained);
  CHECK(t.provenance[1] == Provenance::kTaskTuned);
  CHECK(t.provenance[2] == Provenance::kRandomInit);
}
