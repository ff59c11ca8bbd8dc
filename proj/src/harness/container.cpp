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

#include <zlib.h>

#include <fstream>
#include <sstream>

#include "oovc/bytes.hpp"
#include "oovc/error.hpp"
#include "oovc/harness.hpp"

namespace oovc::harness {

namespace {

constexpr const char* kSectionOrder[] = {"vocab",      "char-vocab", "vectorizer", "embeddings",
                                         "layers",     "gbdt",       "config",     "labels"};

std::uint32_t crc(std::string_view s) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large blobs in pieces.
  while (!s.empty()) {
    const std::size_t n = std::min<std::size_t>(s.size(), 1u << 30);
    c = crc32(c, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(n));
    s.remove_prefix(n);
  }
  return static_cast<std::uint32_t>(c);
}

void put_layer(ByteWriter& w, const nn::LayerParams<float>& p) {
  w.u32(static_cast<std::uint32_t>(p.kind));
  w.u64(p.shape.input_dim);
  w.u64(p.shape.hidden_dim);
  w.u64(p.shape.layers);
  w.u64(p.shape.filter_widths.size());
  for (auto f : p.shape.filter_widths) w.u64(f);
  w.u64(p.weights.size());
  for (const auto& m : p.weights) w.matrix(m);
}

nn::LayerParams<float> get_layer(ByteReader& r) {
  nn::LayerParams<float> p;
  const std::uint32_t kind = r.u32();
  if (kind > static_cast<std::uint32_t>(nn::LayerKind::kEmbedding)) {
    throw ContainerError("layers section: unknown layer kind " + std::to_string(kind));
  }
  p.kind = static_cast<nn::LayerKind>(kind);
  p.shape.input_dim = r.u64();
  p.shape.hidden_dim = r.u64();
  p.shape.layers = r.u64();
  const auto nf = r.count(8);
  for (std::uint64_t i = 0; i < nf; ++i) p.shape.filter_widths.push_back(r.u64());
  const auto nw = r.count(16);
  for (std::uint64_t i = 0; i < nw; ++i) p.weights.push_back(r.matrix<float>());
  try {
    nn::check_params(p);
  } catch (const Error& e) {
    throw ContainerError(std::string("layers section: ") + e.what());
  }
  return p;
}

std::string encode_vocab(const text::WordVocab& v) {
  ByteWriter w;
  w.u64(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    w.str(v.word(i));
    w.u64(v.frequency(i));
  }
  return w.take();
}

text::WordVocab decode_vocab(std::string_view s) {
  ByteReader r(s, "vocab section");
  const auto n = r.count(16);
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  for (std::uint64_t i = 0; i < n; ++i) {
    words.push_back(r.str());
    freq.push_back(r.u64());
  }
  r.expect_done();
  try {
    return text::WordVocab::from_entries(std::move(words), std::move(freq));
  } catch (const Error& e) {
    throw ContainerError(std::string("vocab section: ") + e.what());
  }
}

std::string alphabet() {
  std::string s;
  for (std::size_t i = 0; i < text::CharVocab::kSize; ++i) s += text::CharVocab::symbol(i);
  return s;
}

std::string encode_vectorizer(const std::optional<text::NgramVectorizer>& v) {
  ByteWriter w;
  w.put<std::uint8_t>(v.has_value());
  if (v) {
    const auto& c = v->config();
    w.u64(c.n_min);
    w.u64(c.n_max);
    w.u32(static_cast<std::uint32_t>(c.mode));
    w.u64(c.min_count);
    w.u64(v->columns());
    for (const auto& name : v->column_names()) w.str(name);
  }
  return w.take();
}

std::optional<text::NgramVectorizer> decode_vectorizer(std::string_view s) {
  ByteReader r(s, "vectorizer section");
  std::optional<text::NgramVectorizer> out;
  if (r.get<std::uint8_t>()) {
    text::NgramConfig c;
    c.n_min = r.u64();
    c.n_max = r.u64();
    const auto mode = r.u32();
    if (mode > 1) throw ContainerError("vectorizer section: unknown n-gram mode");
    c.mode = static_cast<text::NgramMode>(mode);
    c.min_count = r.u64();
    const auto n = r.count(8);
    std::vector<std::string> cols;
    for (std::uint64_t i = 0; i < n; ++i) cols.push_back(r.str());
    try {
      out = text::NgramVectorizer::from_columns(c, std::move(cols));
    } catch (const Error& e) {
      throw ContainerError(std::string("vectorizer section: ") + e.what());
    }
  }
  r.expect_done();
  return out;
}

std::string encode_embeddings(const models::Components& c) {
  ByteWriter w;
  w.put<std::uint8_t>(c.recurrent.has_value());
  if (c.recurrent) {
    const auto& t = c.recurrent->embeddings;
    put_layer(w, t.params);
    w.u64(t.provenance.size());
    for (auto p : t.provenance) w.put<std::uint8_t>(static_cast<std::uint8_t>(p));
  }
  return w.take();
}

std::optional<embed::EmbeddingTable> decode_embeddings(std::string_view s) {
  ByteReader r(s, "embeddings section");
  std::optional<embed::EmbeddingTable> out;
  if (r.get<std::uint8_t>()) {
    embed::EmbeddingTable t;
    t.params = get_layer(r);
    if (t.params.kind != nn::LayerKind::kEmbedding) {
      throw ContainerError("embeddings section: not an embedding table");
    }
    const auto n = r.count(1);
    if (n != t.rows()) throw ContainerError("embeddings section: provenance size mismatch");
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto p = r.get<std::uint8_t>();
      if (p > static_cast<std::uint8_t>(embed::Provenance::kComposed)) {
        throw ContainerError("embeddings section: bad provenance flag");
      }
      t.provenance.push_back(static_cast<embed::Provenance>(p));
    }
    out = std::move(t);
  }
  r.expect_done();
  return out;
}

void put_history(ByteWriter& w, const std::vector<models::EpochLog>& h) {
  w.u64(h.size());
  for (const auto& e : h) {
    w.u64(e.epoch);
    w.f64(e.train_loss);
    w.f64(e.validation_loss);
  }
}

std::vector<models::EpochLog> get_history(ByteReader& r) {
  std::vector<models::EpochLog> h;
  const auto n = r.count(24);
  for (std::uint64_t i = 0; i < n; ++i) {
    models::EpochLog e;
    e.epoch = r.u64();
    e.train_loss = r.f64();
    e.validation_loss = r.f64();
    h.push_back(e);
  }
  return h;
}

void put_composer(ByteWriter& w, const models::CompositionModel& m) {
  w.u32(static_cast<std::uint32_t>(m.kind));
  w.put<std::uint8_t>(m.context_mode);
  w.f64(m.dropout);
  put_layer(w, m.reader);
  put_layer(w, m.hidden);
  put_layer(w, m.output);
  put_history(w, m.history);
}

models::CompositionModel get_composer(ByteReader& r) {
  models::CompositionModel m;
  const auto kind = r.u32();
  if (kind > 1) throw ContainerError("layers section: unknown composer kind");
  m.kind = static_cast<models::ComposerKind>(kind);
  m.context_mode = r.get<std::uint8_t>() != 0;
  m.dropout = r.f64();
  m.reader = get_layer(r);
  m.hidden = get_layer(r);
  m.output = get_layer(r);
  m.history = get_history(r);
  const auto want = m.kind == models::ComposerKind::kCnn ? nn::LayerKind::kConvMaxPool
                                                         : nn::LayerKind::kBiLstm;
  if (m.reader.kind != want || m.hidden.kind != nn::LayerKind::kDense ||
      m.output.kind != nn::LayerKind::kDense) {
    throw ContainerError("layers section: composer layers have the wrong kinds");
  }
  return m;
}

// Everything except the embedding table, which has its own section.
std::string encode_layers(const models::Components& c) {
  ByteWriter w;
  w.put<std::uint8_t>(c.recurrent.has_value());
  if (c.recurrent) {
    const auto& m = *c.recurrent;
    w.f64(m.dropout);
    w.u64(m.classes);
    w.put<std::uint8_t>(m.trained);
    put_layer(w, m.gru);
    put_layer(w, m.output);
    put_history(w, m.history);
  }
  w.put<std::uint8_t>(c.c2w.has_value());
  if (c.c2w) {
    const auto& m = *c.c2w;
    w.f64(m.dropout);
    w.u64(m.classes);
    put_layer(w, m.char_bilstm);
    put_layer(w, m.projection);
    put_layer(w, m.gru);
    put_layer(w, m.output);
    put_history(w, m.history);
  }
  w.put<std::uint8_t>(c.composition.has_value());
  if (c.composition) put_composer(w, *c.composition);
  w.put<std::uint8_t>(c.context.has_value());
  if (c.context) {
    put_layer(w, c.context->encoder.bilstm);
    put_composer(w, c.context->composer);
  }
  return w.take();
}

void decode_layers(std::string_view s, models::Components& c,
                   std::optional<embed::EmbeddingTable> table) {
  ByteReader r(s, "layers section");
  if (r.get<std::uint8_t>()) {
    if (!table) throw ContainerError("layers section: recurrent model without embeddings");
    models::RecurrentClassifier m;
    m.embeddings = std::move(*table);
    m.dropout = r.f64();
    m.classes = r.u64();
    m.trained = r.get<std::uint8_t>() != 0;
    m.gru = get_layer(r);
    m.output = get_layer(r);
    m.history = get_history(r);
    if (m.gru.kind != nn::LayerKind::kGru || m.output.kind != nn::LayerKind::kDense ||
        m.gru.shape.input_dim != m.embeddings.dim() ||
        m.output.shape.input_dim != m.gru.shape.hidden_dim ||
        m.output.shape.hidden_dim != m.classes) {
      throw ContainerError("layers section: recurrent layers do not fit together");
    }
    c.recurrent = std::move(m);
  }
  if (r.get<std::uint8_t>()) {
    models::C2WModel m;
    m.dropout = r.f64();
    m.classes = r.u64();
    m.char_bilstm = get_layer(r);
    m.projection = get_layer(r);
    m.gru = get_layer(r);
    m.output = get_layer(r);
    m.history = get_history(r);
    if (m.char_bilstm.kind != nn::LayerKind::kBiLstm || m.gru.kind != nn::LayerKind::kGru ||
        m.output.shape.hidden_dim != m.classes) {
      throw ContainerError("layers section: char-to-word layers do not fit together");
    }
    c.c2w = std::move(m);
  }
  if (r.get<std::uint8_t>()) c.composition = get_composer(r);
  if (r.get<std::uint8_t>()) {
    models::ContextComposer cc;
    cc.encoder.bilstm = get_layer(r);
    cc.composer = get_composer(r);
    c.context = std::move(cc);
  }
  r.expect_done();
}

std::string encode_gbdt(const models::Components& c) {
  ByteWriter w;
  w.u64(c.gbdt.size());
  for (const auto& [family, model] : c.gbdt) {
    w.u32(static_cast<std::uint32_t>(family));
    w.str(model.serialize());
  }
  return w.take();
}

void decode_gbdt(std::string_view s, models::Components& c) {
  ByteReader r(s, "gbdt section");
  const auto n = r.count(12);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto f = r.u32();
    if (f == 0 || f > static_cast<std::uint32_t>(models::Family::kCharWs)) {
      throw ContainerError("gbdt section: unknown feature family");
    }
    c.gbdt.emplace(static_cast<models::Family>(f), gbdt::GbdtEnsemble::deserialize(r.str()));
  }
  r.expect_done();
}

std::string encode_config(const TrainedModel& m) {
  ByteWriter w;
  w.u64(m.methods.size());
  for (auto method : m.methods) w.u32(static_cast<std::uint32_t>(method));
  w.str(to_config_text(m.config));
  w.str(m.stopwords);
  return w.take();
}

void decode_config(std::string_view s, TrainedModel& m) {
  ByteReader r(s, "config section");
  const auto n = r.count(4);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto id = r.u32();
    if (id > static_cast<std::uint32_t>(models::Method::kContextWsCng)) {
      throw ContainerError("config section: unknown method id");
    }
    m.methods.push_back(static_cast<models::Method>(id));
  }
  try {
    apply_config_text(m.config, r.str(), "container config");
  } catch (const InvalidConfigError& e) {
    throw ContainerError(e.what());
  }
  m.stopwords = r.str();
  r.expect_done();
}

std::string encode_labels(const std::vector<std::string>& labels) {
  ByteWriter w;
  w.u64(labels.size());
  for (const auto& l : labels) w.str(l);
  return w.take();
}

}  // namespace

std::string encode_container(const TrainedModel& model) {
  const auto& c = model.components;
  const std::string payloads[] = {encode_vocab(c.vocab),
                                  [] {
                                    ByteWriter w;
                                    w.str(alphabet());
                                    return w.take();
                                  }(),
                                  encode_vectorizer(c.ngrams),
                                  encode_embeddings(c),
                                  encode_layers(c),
                                  encode_gbdt(c),
                                  encode_config(model),
                                  encode_labels(model.labels)};
  ByteWriter w;
  w.raw(std::string_view(kContainerMagic, 4));
  w.u32(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(std::size(payloads)));
  for (std::size_t i = 0; i < std::size(payloads); ++i) {
    w.str(kSectionOrder[i]);
    w.u64(payloads[i].size());
    w.u32(crc(payloads[i]));
  }
  for (const auto& p : payloads) w.raw(p);
  return w.take();
}

namespace {

struct Section {
  std::string name;
  std::string_view data;
};

std::vector<Section> read_sections(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != std::string_view(kContainerMagic, 4)) {
    throw ContainerError("not a model container (bad magic)");
  }
  ByteReader r(bytes.substr(4), "container header");
  const auto version = r.u32();
  if (version != kContainerVersion) {
    throw ContainerError("unsupported container version " + std::to_string(version) +
                         " (this build reads version " + std::to_string(kContainerVersion) +
                         ")");
  }
  const auto n = r.u32();
  if (n > 64) throw ContainerError("container header: implausible section count");
  struct Entry {
    std::string name;
    std::uint64_t size;
    std::uint32_t crc;
  };
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < n; ++i) {
    Entry e;
    e.name = r.str();
    e.size = r.u64();
    e.crc = r.u32();
    entries.push_back(std::move(e));
  }
  std::size_t pos = bytes.size() - r.remaining();
  std::vector<Section> out;
  for (const auto& e : entries) {
    if (e.size > bytes.size() - pos) {
      throw ContainerError("section '" + e.name + "' is truncated");
    }
    const auto data = bytes.substr(pos, e.size);
    pos += e.size;
    if (crc(data) != e.crc) {
      throw ContainerError("checksum mismatch in section '" + e.name + "'");
    }
    out.push_back({e.name, data});
  }
  if (pos != bytes.size()) throw ContainerError("trailing bytes after the last section");
  return out;
}

}  // namespace

std::vector<std::string> container_sections(std::string_view bytes) {
  std::vector<std::string> out;
  for (const auto& s : read_sections(bytes)) out.push_back(s.name);
  return out;
}

TrainedModel decode_container(std::string_view bytes) {
  const auto sections = read_sections(bytes);
  std::map<std::string, std::string_view> by_name;
  for (const auto& s : sections) {
    if (!by_name.emplace(s.name, s.data).second) {
      throw ContainerError("duplicate section '" + s.name + "'");
    }
  }
  auto get = [&](const char* name) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ContainerError(std::string("missing section '") + name + "'");
    return it->second;
  };

  TrainedModel m;
  auto& c = m.components;
  c.vocab = decode_vocab(get("vocab"));
  {
    ByteReader r(get("char-vocab"), "char-vocab section");
    if (r.str() != alphabet()) {
      throw ContainerError("char-vocab section: alphabet differs from this build");
    }
    r.expect_done();
  }
  c.ngrams = decode_vectorizer(get("vectorizer"));
  auto table = decode_embeddings(get("embeddings"));
  if (table && table->rows() != c.vocab.rows()) {
    throw ContainerError("embeddings section: row count does not match the vocabulary");
  }
  decode_layers(get("layers"), c, std::move(table));
  decode_gbdt(get("gbdt"), c);
  decode_config(get("config"), m);
  {
    ByteReader r(get("labels"), "labels section");
    const auto n = r.count(8);
    for (std::uint64_t i = 0; i < n; ++i) m.labels.push_back(r.str());
    r.expect_done();
  }
  c.classes = m.labels.size();
  if (c.classes < 2) throw ContainerError("labels section: fewer than two labels");
  if (m.methods.empty()) throw ContainerError("config section: no methods");
  for (const auto& [f, g] : c.gbdt) {
    if (g.classes != c.classes) throw ContainerError("gbdt section: class count mismatch");
  }
  return m;
}

void save_model(const std::string& path, const TrainedModel& model) {
  const std::string bytes = encode_container(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FileError("cannot write model container " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FileError("failed writing model container " + path);
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open model container " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_container(ss.str());
}

}  // namespace oovc::harness
