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
#include <atomic>
#include <exception>
#include <fstream>
#include <set>
#include <thread>

#include "oovc/error.hpp"
#include "oovc/harness.hpp"

namespace oovc::harness {

namespace {

std::string join_stopwords(const text::StopwordSet& s) {
  const std::set<std::string> sorted(s.begin(), s.end());
  std::string out;
  for (const auto& w : sorted) out += w + "\n";
  return out;
}

Dataset subset(const Dataset& d, std::span<const std::size_t> idx) {
  Dataset out;
  out.labels = d.labels;  // keep the full label space and its order
  for (std::size_t i : idx) out.records.push_back(d.records[i]);
  return out;
}

std::size_t argmax(const std::vector<double>& p) {
  return static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
}

// Labels as indices into `d.labels` (not first-seen in the subset).
std::vector<std::size_t> indices_in(const Dataset& d) {
  std::vector<std::size_t> out;
  for (const auto& r : d.records) out.push_back(d.label_index(r.label));
  return out;
}

TrainedModel train_with_labels(const Dataset& d, const RunConfig& config,
                               const std::vector<models::Method>& methods) {
  validate(config);
  const auto sw = stopwords_for(config);
  const auto texts = normalize_all(d, sw);
  const auto labels = indices_in(d);
  models::PipelineConfig pc = config.pipeline;
  pc.seed = config.seed;

  TrainedModel m;
  m.methods = methods;
  m.labels = d.labels;
  m.stopwords = join_stopwords(sw);
  m.config = config;
  m.config.methods = methods;
  std::optional<embed::EmbeddingTable> initial;
  std::optional<text::WordVocab> vocab;
  if (!config.embeddings.empty()) {
    vocab = text::WordVocab::build(texts);
    initial = embed::load_pretrained(config.embeddings, *vocab, config.seed);
  }
  m.components = models::train_components(methods, texts, labels, d.labels.size(), pc,
                                          std::move(initial), std::move(vocab));
  return m;
}

std::vector<MethodReport> score(const TrainedModel& m, const Dataset& test,
                                const text::StopwordSet& sw) {
  const auto gold = indices_in(test);
  std::vector<text::NormalizedText> texts = normalize_all(test, sw);
  std::vector<MethodReport> out;
  for (auto method : m.methods) {
    std::vector<std::size_t> pred;
    for (const auto& t : texts) pred.push_back(argmax(models::predict(method, m.components, t)));
    out.push_back({method, eval::compute_metrics(gold, pred, test.labels.size())});
  }
  return out;
}

}  // namespace

text::StopwordSet stopwords_for(const RunConfig& config) {
  return config.stopwords.empty() ? text::default_stopwords()
                                  : text::load_stopwords(config.stopwords);
}

std::vector<text::NormalizedText> normalize_all(const Dataset& d,
                                                const text::StopwordSet& stopwords) {
  std::vector<text::NormalizedText> out;
  out.reserve(d.records.size());
  for (const auto& r : d.records) out.push_back(text::normalize_and_tokenize(r.text, stopwords));
  return out;
}

TrainedModel train_model(const Dataset& d, const RunConfig& config) {
  return train_with_labels(d, config, config.methods);
}

std::vector<double> predict_text(const TrainedModel& m, models::Method method,
                                 std::string_view text) {
  if (std::find(m.methods.begin(), m.methods.end(), method) == m.methods.end()) {
    throw InvalidConfigError(std::string("model was not trained for method ") +
                             models::to_string(method));
  }
  const auto sw = text::parse_stopwords(m.stopwords);
  return models::predict(method, m.components, text::normalize_and_tokenize(text, sw));
}

std::vector<MethodReport> evaluate_holdout(const Dataset& d, const RunConfig& config) {
  validate(config);
  const auto labels = d.label_indices();
  const auto split = eval::split_train_test(labels, config.split_ratio, true, config.seed);
  const auto train = subset(d, split.train);
  const auto test = subset(d, split.test);
  const auto m = train_model(train, config);
  return score(m, test, stopwords_for(config));
}

CvResult cross_validate(const Dataset& d, const RunConfig& config,
                        std::optional<models::Method> baseline) {
  validate(config);
  const auto labels = d.label_indices();
  const auto plan = eval::stratified_kfold(labels, config.folds, config.seed);
  std::vector<models::Method> methods = config.methods;
  if (baseline && std::find(methods.begin(), methods.end(), *baseline) == methods.end()) {
    methods.push_back(*baseline);
  }
  const auto sw = stopwords_for(config);

  std::vector<std::vector<MethodReport>> per_fold(config.folds);
  std::vector<std::exception_ptr> errors(config.folds);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t f = next++; f < config.folds; f = next++) {
      try {
        RunConfig fc = config;
        fc.seed = config.seed + f;
        const auto tr = plan.train_indices(f);
        const auto te = plan.test_indices(f);
        const auto m = train_with_labels(subset(d, tr), fc, methods);
        per_fold[f] = score(m, subset(d, te), sw);
      } catch (...) {
        errors[f] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(config.jobs, config.folds);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  CvResult out;
  out.baseline = baseline;
  std::optional<std::size_t> base_index;
  for (std::size_t k = 0; k < methods.size(); ++k) {
    std::vector<eval::MetricsReport> reports;
    for (const auto& fold : per_fold) reports.push_back(fold[k].report);
    out.methods.push_back({methods[k], eval::average_reports(reports)});
    if (baseline && methods[k] == *baseline) base_index = k;
  }
  if (base_index) {
    for (const auto& mr : out.methods) {
      out.tests.push_back(eval::paired_t_test(mr.report.fold_scores,
                                              out.methods[*base_index].report.fold_scores));
    }
  }
  return out;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kInvalidConfig:
      return 1;
    case ErrorKind::kTraining:
      return 3;
    case ErrorKind::kInvalidInput:
    case ErrorKind::kFormat:
    case ErrorKind::kFile:
    case ErrorKind::kContainer:
    case ErrorKind::kStratification:
      return 2;
  }
  return 2;
}

OovStats dictionary_oov_stats(const Dataset& d, const std::vector<std::string>& wordlist,
                              const text::StopwordSet& stopwords) {
  std::unordered_set<std::string> dict;
  for (const auto& w : wordlist) {
    for (const auto& t : text::normalize_and_tokenize(w, {}).tokens) dict.insert(t);
  }
  OovStats s;
  s.class_unique.assign(d.labels.size(), 0);
  s.class_absent.assign(d.labels.size(), 0);
  std::set<std::string> all;
  std::vector<std::set<std::string>> per_class(d.labels.size());
  for (const auto& r : d.records) {
    const std::size_t c = d.label_index(r.label);
    for (const auto& t : text::normalize_and_tokenize(r.text, stopwords).tokens) {
      all.insert(t);
      per_class[c].insert(t);
    }
  }
  for (const auto& t : all) {
    if (!dict.count(t)) s.absent.push_back(t);
  }
  s.unique_tokens = all.size();
  s.absent_tokens = s.absent.size();
  s.absent_fraction = all.empty() ? 0.0
                                  : static_cast<double>(s.absent_tokens) /
                                        static_cast<double>(s.unique_tokens);
  for (std::size_t c = 0; c < per_class.size(); ++c) {
    s.class_unique[c] = per_class[c].size();
    for (const auto& t : per_class[c]) s.class_absent[c] += !dict.count(t);
  }
  return s;
}

OovStats dictionary_oov_stats(const Dataset& d, const std::string& wordlist_path,
                              const text::StopwordSet& stopwords) {
  std::ifstream in(wordlist_path);
  if (!in) throw FileError("cannot open word list " + wordlist_path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return dictionary_oov_stats(d, words, stopwords);
}

}  // namespace oovc::harness
