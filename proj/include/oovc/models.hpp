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

// The ten classification methods: recurrent hidden-state classifiers,
// word-sum features, the character-level word composition model with its
// optional context encoder, and the character-to-word baselines.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oovc/embeddings.hpp"
#include "oovc/gbdt.hpp"
#include "oovc/nn.hpp"
#include "oovc/text.hpp"

namespace oovc::models {

enum class Method : std::uint32_t {
  kHs = 0,
  kCharHs,
  kHsCng,
  kAugmentedHsCng,
  kContextHsCng,
  kWs,
  kCharWs,
  kWsCng,
  kAugmentedWsCng,
  kContextWsCng,
};

inline constexpr Method kAllMethods[] = {
    Method::kHs,    Method::kCharHs, Method::kHsCng, Method::kAugmentedHsCng,
    Method::kContextHsCng, Method::kWs, Method::kCharWs, Method::kWsCng,
    Method::kAugmentedWsCng, Method::kContextWsCng};

// Lowercase dash-separated tags such as "augmented-ws-cng".
const char* to_string(Method m);
// Throws InvalidConfigError naming the valid tags.
Method parse_method(std::string_view tag);

// Feature families a GBDT is trained on. AUGMENTED and CONTEXT variants reuse
// the plain family: on training texts every word is in the vocabulary, so
// their training features coincide with the plain ones.
enum class Family : std::uint32_t { kNone = 0, kHsCng, kWs, kWsCng, kCharWs };

Family family(Method m);
bool needs_recurrent(Method m);   // word-level GRU classifier
bool needs_c2w(Method m);
bool needs_ngrams(Method m);
bool needs_composition(Method m);  // AUGMENTED or CONTEXT
bool needs_context(Method m);

// ------------------------------------------------------ recurrent model --

struct TrainingConfig {
  std::size_t hidden = 128;
  double dropout = 0.5;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::size_t max_epochs = 50;
  std::size_t patience = 3;
  double validation_fraction = 0.1;
  double clip_norm = 5.0;  // global gradient norm cap, 0 disables
  std::uint64_t seed = 1;
};

void validate(const TrainingConfig& config);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;  // NaN without a validation split
};

struct RecurrentClassifier {
  embed::EmbeddingTable embeddings;  // task-tuned after training
  nn::LayerParams<float> gru;        // 2 layers
  nn::LayerParams<float> output;     // dense hidden -> classes
  double dropout = 0.5;
  std::size_t classes = 0;
  bool trained = false;
  std::vector<EpochLog> history;

  std::size_t hidden() const { return gru.shape.hidden_dim; }

  // Last top-layer GRU state (evaluation mode) for a sequence of word
  // vectors; an empty sequence must be replaced by the caller.
  std::vector<float> last_hidden(const Matrix<float>& inputs) const;
  // Softmax over the output layer applied to last_hidden.
  std::vector<double> distribution(const Matrix<float>& inputs) const;
};

// Word vectors of a token list: tuned rows, the OOV row for unseen words.
// An empty list becomes the single OOV row.
Matrix<float> word_inputs(const embed::EmbeddingTable& table,
                          const text::WordVocab& vocab,
                          std::span<const std::string> tokens);

// Trains embeddings, GRU and output layer end to end with Adam on
// cross-entropy, early-stopping on a held-out validation split. Throws
// InvalidInputError for a single-class dataset and TrainingError when the
// loss stops being finite.
RecurrentClassifier train_recurrent(
    std::span<const std::vector<std::string>> docs,
    std::span<const std::size_t> labels, std::size_t classes,
    const text::WordVocab& vocab, embed::EmbeddingTable initial,
    const TrainingConfig& config);

// L2-normalized sum of word vectors; empty input gives the zero vector.
std::vector<float> ws_feature(const Matrix<float>& word_vectors);
std::vector<float> ws_feature(const embed::EmbeddingTable& table,
                              const text::WordVocab& vocab,
                              std::span<const std::string> tokens);

// ------------------------------------------------- composition model --

enum class ComposerKind : std::uint32_t { kBiLstm = 0, kCnn = 1 };

struct CompositionConfig {
  ComposerKind kind = ComposerKind::kBiLstm;
  std::size_t hidden = 256;  // LSTM units per direction, or filters per width
  std::size_t layers = 2;
  std::vector<std::size_t> filter_widths{1, 2, 3, 4};
  std::size_t tanh_hidden = 256;
  double dropout = 0.5;
  std::size_t encoder_hidden = 64;  // context encoder units per direction
  double learning_rate = 1e-3;
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t min_epochs = 1;
  std::size_t patience = 3;
  double holdout_fraction = 0.1;
  std::uint64_t seed = 1;
};

void validate(const CompositionConfig& config);

struct ContextEncoder {
  nn::LayerParams<float> bilstm;  // 1 layer over characters

  std::size_t dim() const { return bilstm.shape.hidden_dim; }
  // One row per character: (forward state + backward state) / 2.
  Matrix<float> encode(std::span<const std::size_t> char_ids) const;
};

struct CompositionModel {
  ComposerKind kind = ComposerKind::kBiLstm;
  bool context_mode = false;
  nn::LayerParams<float> reader;  // bilstm or conv over character inputs
  nn::LayerParams<float> hidden;  // dense, tanh
  nn::LayerParams<float> output;  // dense, identity, width d
  double dropout = 0.5;
  std::vector<EpochLog> history;  // validation_loss is held-out MSE

  std::size_t dim() const { return output.shape.hidden_dim; }
  std::size_t input_dim() const { return reader.shape.input_dim; }

  // Evaluation-mode forward pass over per-character input rows.
  std::vector<float> forward(const Matrix<float>& char_inputs) const;
};

// One-hot rows over the fixed character alphabet.
Matrix<float> one_hot_chars(std::span<const std::size_t> char_ids);

// Learns to reproduce tuned embeddings from spelling. Each vocabulary word is
// presented as often as it occurs in the corpus (per-epoch seeded shuffle);
// a held-out subset of word types drives early stopping. Throws
// InvalidInputError for a vocabulary of fewer than 10 words.
CompositionModel train_composition(const embed::EmbeddingTable& tuned,
                                   const text::WordVocab& vocab,
                                   const CompositionConfig& config);

struct ContextComposer {
  ContextEncoder encoder;
  CompositionModel composer;
};

// Encoder and composer trained jointly: every token occurrence in the
// training texts is a target (its tuned embedding) for the composer reading
// the encoder outputs inside the token's span.
ContextComposer train_context_encoder_joint(
    std::span<const std::vector<std::string>> docs,
    const embed::EmbeddingTable& tuned, const text::WordVocab& vocab,
    const CompositionConfig& config);

// One-hot mode, word in isolation. Throws InvalidInputError for an empty
// word and InvalidConfigError for a context-mode model.
std::vector<float> compose(const CompositionModel& model, std::string_view word);

// Context mode: composed vector for tokens[index] read in its text.
std::vector<float> compose(const ContextComposer& model,
                           std::span<const std::string> tokens,
                           std::size_t index);

// ------------------------------------------------------------------ c2w --

struct C2WConfig {
  TrainingConfig training;
  std::size_t char_hidden = 64;
  std::size_t word_dim = 0;  // intermediate embedding width, 0 = embedding dim
};

struct C2WModel {
  nn::LayerParams<float> char_bilstm;  // 2 layers over one-hot characters
  nn::LayerParams<float> projection;   // dense [fwd ; bwd] -> word_dim
  nn::LayerParams<float> gru;
  nn::LayerParams<float> output;
  double dropout = 0.5;
  std::size_t classes = 0;
  std::vector<EpochLog> history;

  std::size_t word_dim() const { return projection.shape.hidden_dim; }
  // One intermediate embedding per token (a single space character stands
  // in for an empty token list).
  Matrix<float> word_embeddings(std::span<const std::string> tokens) const;
  std::vector<double> distribution(std::span<const std::string> tokens) const;
};

C2WModel train_c2w(std::span<const std::vector<std::string>> docs,
                   std::span<const std::size_t> labels, std::size_t classes,
                   const C2WConfig& config);

// ------------------------------------------------------------ pipeline --

struct Components {
  std::size_t classes = 0;
  text::WordVocab vocab;
  std::optional<RecurrentClassifier> recurrent;
  std::optional<C2WModel> c2w;
  std::optional<text::NgramVectorizer> ngrams;
  std::optional<CompositionModel> composition;
  std::optional<ContextComposer> context;
  std::map<Family, gbdt::GbdtEnsemble> gbdt;
};

struct FeatureBundle {
  Method method = Method::kHs;
  std::size_t base_length = 0;
  std::vector<double> values;
};

// Word vectors for a text under `method`: unseen words take composed vectors
// for AUGMENTED/CONTEXT methods, the OOV row otherwise.
Matrix<float> method_word_inputs(Method method, const Components& c,
                                 std::span<const std::string> tokens);

// Throws InvalidConfigError when a required component is missing.
FeatureBundle build_feature_bundle(Method method, const text::NormalizedText& text,
                                   const Components& c);

// Class distribution, summing to 1 within 1e-9.
std::vector<double> predict(Method method, const Components& c,
                            const text::NormalizedText& text);

struct PipelineConfig {
  std::size_t embedding_dim = 32;  // random-init width when no file is given
  TrainingConfig recurrent;
  C2WConfig c2w;
  CompositionConfig composition;
  text::NgramConfig ngram;
  gbdt::GbdtConfig gbdt;
  bool grid_search = false;
  gbdt::GridSpec grid;
  std::size_t grid_folds = 5;
  std::uint64_t seed = 1;
};

// Trains everything the listed methods need, sharing components between
// them (one GRU classifier, one composition model, one GBDT per family).
// `initial` supplies pretrained embeddings over `vocab`; otherwise rows are
// random-init.
Components train_components(std::span<const Method> methods,
                            std::span<const text::NormalizedText> texts,
                            std::span<const std::size_t> labels,
                            std::size_t classes, const PipelineConfig& config,
                            std::optional<embed::EmbeddingTable> initial = {},
                            std::optional<text::WordVocab> vocab = {});

}  // namespace oovc::models
