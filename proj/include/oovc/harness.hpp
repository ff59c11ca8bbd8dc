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

// Dataset files, run configuration, model containers, dictionary statistics
// and the train/evaluate/cv experiment drivers behind the command line.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oovc/bench.hpp"
#include "oovc/evaluation.hpp"
#include "oovc/models.hpp"

namespace oovc::harness {

// ------------------------------------------------------------- datasets --

struct DatasetRecord {
  std::string id;
  std::string label;
  std::string text;
  std::vector<std::string> provenance;  // optional 4th column, space separated
};

struct Dataset {
  std::vector<DatasetRecord> records;
  std::vector<std::string> labels;  // first-seen order

  std::size_t label_index(std::string_view label) const;  // throws FormatError
  std::vector<std::size_t> label_indices() const;
};

// "id<TAB>label<TAB>text[<TAB>provenance]" per line; fields may use the
// escapes \t, \n, \r and \\ (backslash). Blank lines are skipped.
// FormatError (with the line number) on malformed lines, duplicate ids and
// files without records.
Dataset parse_dataset(std::string_view contents, const std::string& source = "<memory>");
Dataset load_dataset(const std::string& path);

std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s, std::size_t line);  // throws FormatError

void write_dataset(std::ostream& out, const Dataset& d);
void save_dataset(const std::string& path, const Dataset& d);

// A generated split in dataset form, class names as labels.
Dataset to_dataset(const bench::Corpus& corpus, bool test_split);

// ---------------------------------------------------------- run config --

struct RunConfig {
  std::vector<models::Method> methods{models::Method::kAugmentedWsCng};
  std::string data;
  std::string embeddings;  // pretrained vectors; random-init when empty
  std::string stopwords;   // default list when empty
  std::uint64_t seed = 1;
  std::size_t folds = 10;
  double split_ratio = 0.6;
  std::size_t jobs = 1;
  models::PipelineConfig pipeline;
};

// Applies "key = value" lines ('#' comments, blank lines allowed). Unknown
// keys and bad values throw InvalidConfigError naming the line.
void apply_config_text(RunConfig& config, std::string_view text,
                       const std::string& source = "<config>");
void apply_config_file(RunConfig& config, const std::string& path);
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
// Every key with its current value, in a fixed order; parses back to an
// equal configuration.
std::string to_config_text(const RunConfig& config);
std::vector<std::string> config_keys();

// Checks ranges and method/config consistency.
void validate(const RunConfig& config);

// ------------------------------------------------------------ container --

inline constexpr char kContainerMagic[4] = {'O', 'O', 'V', 'F'};
inline constexpr std::uint32_t kContainerVersion = 1;

struct TrainedModel {
  std::vector<models::Method> methods;
  std::vector<std::string> labels;
  std::string stopwords;  // newline-joined list used at training time
  RunConfig config;
  models::Components components;
};

// Sections: vocab, char-vocab, vectorizer, embeddings, layers, gbdt, config,
// labels. Each carries a CRC-32. Network weights are stored as f32.
std::string encode_container(const TrainedModel& model);
// Throws ContainerError on bad magic, unknown version, checksum mismatch or
// malformed sections.
TrainedModel decode_container(std::string_view bytes);
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

// Section names in file order.
std::vector<std::string> container_sections(std::string_view bytes);

// --------------------------------------------------------------- stats --

struct OovStats {
  std::size_t unique_tokens = 0;
  std::size_t absent_tokens = 0;
  double absent_fraction = 0.0;
  std::vector<std::size_t> class_unique;  // per dataset label
  std::vector<std::size_t> class_absent;
  std::vector<std::string> absent;  // sorted
};

// Unique normalized tokens missing from the word list, overall and per class.
OovStats dictionary_oov_stats(const Dataset& d, const std::vector<std::string>& wordlist,
                              const text::StopwordSet& stopwords);
// Throws FileError when the word list is missing.
OovStats dictionary_oov_stats(const Dataset& d, const std::string& wordlist_path,
                              const text::StopwordSet& stopwords);

// ---------------------------------------------------------- experiments --

text::StopwordSet stopwords_for(const RunConfig& config);

std::vector<text::NormalizedText> normalize_all(const Dataset& d,
                                                const text::StopwordSet& stopwords);

// Trains on every record of `d`.
TrainedModel train_model(const Dataset& d, const RunConfig& config);

std::vector<double> predict_text(const TrainedModel& m, models::Method method,
                                 std::string_view text);

struct MethodReport {
  models::Method method;
  eval::MetricsReport report;
};

// Stratified split_ratio train/test protocol.
std::vector<MethodReport> evaluate_holdout(const Dataset& d, const RunConfig& config);

struct CvResult {
  std::vector<MethodReport> methods;  // fold-averaged, fold_scores filled
  std::optional<models::Method> baseline;
  std::vector<eval::TTestResult> tests;  // per method vs baseline
};

// Stratified k-fold; fold f trains with seed + f. Folds run on up to
// config.jobs threads with identical results for any job count.
CvResult cross_validate(const Dataset& d, const RunConfig& config,
                        std::optional<models::Method> baseline);

// Maps an error kind to the command-line exit status.
int exit_code(ErrorKind kind);

}  // namespace oovc::harness
