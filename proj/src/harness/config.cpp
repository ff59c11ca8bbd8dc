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

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "oovc/error.hpp"
#include "oovc/harness.hpp"

namespace oovc::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw InvalidConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw InvalidConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InvalidConfigError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string join(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SIZE_KEY(NAME, FIELD)                                                  \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_size(NAME, v); }, \
      [](const RunConfig& c) { return std::to_string(c.FIELD); }}
#define DOUBLE_KEY(NAME, FIELD)                                                  \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
      [](const RunConfig& c) { return fmt(c.FIELD); }}
#define STRING_KEY(NAME, FIELD)                                      \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = v; }, \
      [](const RunConfig& c) { return c.FIELD; }}
// Recurrent hyperparameters are shared by the word GRU and the C2W model.
#define TRAIN_KEY(NAME, FIELD, CONV, FMT)                      \
  Key{NAME,                                                    \
      [](RunConfig& c, const std::string& v) {                 \
        c.pipeline.recurrent.FIELD = CONV(NAME, v);            \
        c.pipeline.c2w.training.FIELD = c.pipeline.recurrent.FIELD; \
      },                                                       \
      [](const RunConfig& c) { return FMT(c.pipeline.recurrent.FIELD); }}

std::string size_str(std::size_t v) { return std::to_string(v); }

const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      Key{"methods",
          [](RunConfig& c, const std::string& v) {
            c.methods.clear();
            for (const auto& m : split_list(v)) c.methods.push_back(models::parse_method(m));
            if (c.methods.empty()) throw InvalidConfigError("methods: empty list");
          },
          [](const RunConfig& c) {
            std::string out;
            for (std::size_t i = 0; i < c.methods.size(); ++i) {
              out += (i ? "," : "") + std::string(models::to_string(c.methods[i]));
            }
            return out;
          }},
      STRING_KEY("data", data),
      STRING_KEY("embeddings", embeddings),
      STRING_KEY("stopwords", stopwords),
      Key{"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      SIZE_KEY("folds", folds),
      DOUBLE_KEY("split", split_ratio),
      SIZE_KEY("jobs", jobs),
      SIZE_KEY("embedding_dim", pipeline.embedding_dim),
      TRAIN_KEY("hidden", hidden, to_size, size_str),
      TRAIN_KEY("dropout", dropout, to_double, fmt),
      TRAIN_KEY("batch_size", batch_size, to_size, size_str),
      TRAIN_KEY("learning_rate", learning_rate, to_double, fmt),
      TRAIN_KEY("max_epochs", max_epochs, to_size, size_str),
      TRAIN_KEY("patience", patience, to_size, size_str),
      TRAIN_KEY("validation_fraction", validation_fraction, to_double, fmt),
      TRAIN_KEY("clip_norm", clip_norm, to_double, fmt),
      SIZE_KEY("c2w_char_hidden", pipeline.c2w.char_hidden),
      SIZE_KEY("c2w_word_dim", pipeline.c2w.word_dim),
      Key{"composer",
          [](RunConfig& c, const std::string& v) {
            if (v == "lstm") {
              c.pipeline.composition.kind = models::ComposerKind::kBiLstm;
            } else if (v == "cnn") {
              c.pipeline.composition.kind = models::ComposerKind::kCnn;
            } else {
              throw InvalidConfigError("composer: expected lstm or cnn, got '" + v + "'");
            }
          },
          [](const RunConfig& c) {
            return std::string(c.pipeline.composition.kind == models::ComposerKind::kCnn
                                   ? "cnn"
                                   : "lstm");
          }},
      SIZE_KEY("composer_hidden", pipeline.composition.hidden),
      SIZE_KEY("composer_layers", pipeline.composition.layers),
      Key{"composer_filters",
          [](RunConfig& c, const std::string& v) {
            c.pipeline.composition.filter_widths.clear();
            for (const auto& w : split_list(v)) {
              c.pipeline.composition.filter_widths.push_back(to_size("composer_filters", w));
            }
          },
          [](const RunConfig& c) { return join(c.pipeline.composition.filter_widths); }},
      SIZE_KEY("composer_tanh_hidden", pipeline.composition.tanh_hidden),
      DOUBLE_KEY("composer_dropout", pipeline.composition.dropout),
      SIZE_KEY("encoder_hidden", pipeline.composition.encoder_hidden),
      DOUBLE_KEY("composer_learning_rate", pipeline.composition.learning_rate),
      SIZE_KEY("composer_batch_size", pipeline.composition.batch_size),
      SIZE_KEY("composer_max_epochs", pipeline.composition.max_epochs),
      SIZE_KEY("composer_min_epochs", pipeline.composition.min_epochs),
      SIZE_KEY("composer_patience", pipeline.composition.patience),
      DOUBLE_KEY("composer_holdout", pipeline.composition.holdout_fraction),
      SIZE_KEY("ngram_min", pipeline.ngram.n_min),
      SIZE_KEY("ngram_max", pipeline.ngram.n_max),
      Key{"ngram_mode",
          [](RunConfig& c, const std::string& v) {
            if (v == "text") {
              c.pipeline.ngram.mode = text::NgramMode::kTextWide;
            } else if (v == "token") {
              c.pipeline.ngram.mode = text::NgramMode::kPerToken;
            } else {
              throw InvalidConfigError("ngram_mode: expected text or token, got '" + v + "'");
            }
          },
          [](const RunConfig& c) {
            return std::string(c.pipeline.ngram.mode == text::NgramMode::kPerToken ? "token"
                                                                                  : "text");
          }},
      SIZE_KEY("ngram_min_count", pipeline.ngram.min_count),
      SIZE_KEY("gbdt_rounds", pipeline.gbdt.rounds),
      DOUBLE_KEY("gbdt_learning_rate", pipeline.gbdt.learning_rate),
      SIZE_KEY("gbdt_max_depth", pipeline.gbdt.max_depth),
      SIZE_KEY("gbdt_min_leaf", pipeline.gbdt.min_leaf),
      DOUBLE_KEY("gbdt_lambda", pipeline.gbdt.lambda),
      Key{"grid_search",
          [](RunConfig& c, const std::string& v) {
            c.pipeline.grid_search = to_bool("grid_search", v);
          },
          [](const RunConfig& c) {
            return std::string(c.pipeline.grid_search ? "true" : "false");
          }},
      SIZE_KEY("grid_folds", pipeline.grid_folds),
  };
  return k;
}

#undef SIZE_KEY
#undef DOUBLE_KEY
#undef STRING_KEY
#undef TRAIN_KEY

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

void set_config_value(RunConfig& config, const std::string& key, const std::string& value) {
  for (const auto& k : keys()) {
    if (key == k.name) {
      k.set(config, value);
      return;
    }
  }
  throw InvalidConfigError("unknown config key '" + key + "'");
}

void apply_config_text(RunConfig& config, std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    }
    try {
      set_config_value(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    } catch (const InvalidConfigError& e) {
      throw InvalidConfigError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(config, ss.str(), path);
}

std::string to_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += std::string(k.name) + " = " + k.get(config) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  if (c.methods.empty()) throw InvalidConfigError("no methods configured");
  if (c.folds < 2) throw InvalidConfigError("folds must be at least 2");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw InvalidConfigError("split must lie strictly between 0 and 1");
  }
  if (c.jobs == 0) throw InvalidConfigError("jobs must be positive");
  if (c.pipeline.embedding_dim == 0) throw InvalidConfigError("embedding_dim must be positive");
  models::validate(c.pipeline.recurrent);
  text::validate(c.pipeline.ngram);
  gbdt::validate(c.pipeline.gbdt);
  bool composer = false;
  for (auto m : c.methods) {
    composer = composer || models::needs_composition(m) || models::needs_context(m);
  }
  if (composer) models::validate(c.pipeline.composition);
  if (c.pipeline.grid_search && c.pipeline.grid_folds < 2) {
    throw InvalidConfigError("grid_folds must be at least 2");
  }
}

}  // namespace oovc::harness
