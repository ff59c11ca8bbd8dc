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

#include "oovc/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "oovc/error.hpp"

namespace oovc::embed {

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kPretrained: return "pretrained";
    case Provenance::kRandomInit: return "random-init";
    case Provenance::kTaskTuned: return "task-tuned";
    case Provenance::kComposed: return "composed";
  }
  return "unknown";
}

void EmbeddingTable::mark_tuned(std::span<const std::size_t> rows) {
  for (std::size_t r : rows) provenance.at(r) = Provenance::kTaskTuned;
}

EmbeddingTable random_table(const text::WordVocab& vocab, std::size_t dim,
                            std::uint64_t seed) {
  EmbeddingTable t;
  t.params = nn::init_params<float>(nn::LayerKind::kEmbedding,
                                    {vocab.rows(), dim},
                                    {nn::InitMode::kUniform, kRandomInitRange},
                                    seed);
  t.provenance.assign(vocab.rows(), Provenance::kRandomInit);
  return t;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

EmbeddingTable parse_pretrained(std::string_view contents,
                                const text::WordVocab& vocab,
                                std::uint64_t seed,
                                std::optional<std::size_t> expected_dim) {
  struct Entry {
    std::size_t row;
    std::vector<float> values;
  };
  std::vector<Entry> found;
  std::vector<bool> seen(vocab.rows(), false);
  std::optional<std::size_t> dim = expected_dim;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string where = "embedding file line " + std::to_string(line_no);
    if (fields.size() < 2) throw FormatError(where + ": no vector values");
    const std::size_t d = fields.size() - 1;
    if (!dim) {
      dim = d;
    } else if (*dim != d) {
      throw FormatError(where + ": expected " + std::to_string(*dim) +
                        " values, found " + std::to_string(d));
    }
    std::vector<float> values(d);
    for (std::size_t k = 0; k < d; ++k) {
      auto f = fields[k + 1];
      auto res = std::from_chars(f.data(), f.data() + f.size(), values[k]);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() ||
          !std::isfinite(values[k])) {
        throw FormatError(where + ": cannot parse value '" + std::string(f) +
                          "'");
      }
    }
    auto idx = vocab.find(fields[0]);
    if (idx && !seen[*idx]) {
      seen[*idx] = true;
      found.push_back({*idx, std::move(values)});
    }
  }
  if (!dim) throw FormatError("embedding file contains no vectors");
  EmbeddingTable t = random_table(vocab, *dim, seed);
  for (auto& e : found) {
    std::copy(e.values.begin(), e.values.end(), t.matrix().row_ptr(e.row));
    t.provenance[e.row] = Provenance::kPretrained;
  }
  return t;
}

EmbeddingTable load_pretrained(const std::string& path,
                               const text::WordVocab& vocab, std::uint64_t seed,
                               std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open embedding file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_pretrained(ss.str(), vocab, seed, expected_dim);
}

std::span<const float> lookup(const EmbeddingTable& table,
                              const text::WordVocab& vocab,
                              std::string_view token) {
  return table.row(vocab.encode(token));
}

double cosine(std::span<const float> a, std::span<const float> b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const text::WordVocab& vocab,
                                        std::span<const float> query,
                                        std::size_t k,
                                        std::optional<std::size_t> exclude) {
  if (k == 0) throw InvalidInputError("nearest_neighbors needs k >= 1");
  if (query.size() != table.dim()) {
    throw InvalidInputError("query vector has the wrong dimension");
  }
  if (std::all_of(query.begin(), query.end(), [](float x) { return x == 0.0f; })) {
    throw InvalidInputError("nearest_neighbors query is the zero vector");
  }
  std::vector<Neighbor> all;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (exclude && *exclude == i) continue;
    all.push_back({vocab.word(i), i, cosine(query, table.row(i))});
  }
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + n, all.end(),
                    [](const Neighbor& a, const Neighbor& b) {
                      if (a.cosine != b.cosine) return a.cosine > b.cosine;
                      return a.index < b.index;
                    });
  all.resize(n);
  return all;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const text::WordVocab& vocab,
                                        std::string_view token, std::size_t k) {
  auto idx = vocab.find(token);
  return nearest_neighbors(table, vocab, lookup(table, vocab, token), k, idx);
}

}  // namespace oovc::embed
