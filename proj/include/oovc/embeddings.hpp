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

// Word embedding tables: pretrained ingestion, OOV handling and cosine
// nearest-neighbor queries.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oovc/nn.hpp"
#include "oovc/text.hpp"

namespace oovc::embed {

enum class Provenance : std::uint8_t {
  kPretrained = 0,
  kRandomInit = 1,
  kTaskTuned = 2,
  kComposed = 3,
};

const char* to_string(Provenance p);

inline constexpr double kRandomInitRange = 0.05;

// |vocab| + 1 rows; the last row is the shared OOV token.
struct EmbeddingTable {
  nn::LayerParams<float> params;  // kind embedding, weights[0] is the table
  std::vector<Provenance> provenance;

  std::size_t dim() const { return params.shape.hidden_dim; }
  std::size_t rows() const { return params.shape.input_dim; }
  std::size_t oov_row() const { return rows() - 1; }
  Matrix<float>& matrix() { return params.weights[0]; }
  const Matrix<float>& matrix() const { return params.weights[0]; }
  std::span<const float> row(std::size_t i) const { return matrix().row(i); }

  // Flags rows touched by training as task-tuned.
  void mark_tuned(std::span<const std::size_t> rows);

  bool operator==(const EmbeddingTable&) const = default;
};

// Every row uniform in +-0.05, flagged random-init.
EmbeddingTable random_table(const text::WordVocab& vocab, std::size_t dim,
                            std::uint64_t seed);

// Reads "token v1 ... vd" lines. Vocabulary words found in the file take
// their vector; all other rows (OOV included) are random-init. Tokens that
// are not in the vocabulary are discarded. Throws FileError if the file
// cannot be opened and FormatError (with a line number) on malformed input.
EmbeddingTable load_pretrained(const std::string& path,
                               const text::WordVocab& vocab,
                               std::uint64_t seed,
                               std::optional<std::size_t> expected_dim = {});

// Same, from in-memory text.
EmbeddingTable parse_pretrained(std::string_view contents,
                                const text::WordVocab& vocab,
                                std::uint64_t seed,
                                std::optional<std::size_t> expected_dim = {});

// Row for `token`, the OOV row when unseen.
std::span<const float> lookup(const EmbeddingTable& table,
                              const text::WordVocab& vocab,
                              std::string_view token);

double cosine(std::span<const float> a, std::span<const float> b);

struct Neighbor {
  std::string token;
  std::size_t index;
  double cosine;

  bool operator==(const Neighbor&) const = default;
};

// Top-k rows by cosine similarity to `query`, excluding the OOV row and
// `exclude` if given. Ties are ordered by vocabulary index. Throws
// InvalidInputError for k == 0 or a zero query.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const text::WordVocab& vocab,
                                        std::span<const float> query,
                                        std::size_t k,
                                        std::optional<std::size_t> exclude = {});

// Query by word: the word's own row (OOV row when unseen); an in-vocabulary
// query word is excluded from its own results.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table,
                                        const text::WordVocab& vocab,
                                        std::string_view token, std::size_t k);

}  // namespace oovc::embed
