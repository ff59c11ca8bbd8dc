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

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Tolerances and budgets are fixed here, not taken from flags.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "gradcheck.hpp"
#include "oovc/bench.hpp"
#include "oovc/error.hpp"
#include "oovc/evaluation.hpp"
#include "oovc/gbdt.hpp"
#include "oovc/harness.hpp"
#include "oovc/models.hpp"
#include "oovc/nn.hpp"

using namespace oovc;
using oovc::testing::check_layer;
using oovc::testing::check_matrix;
using oovc::testing::random_matrix;
using oovc::testing::weighted_sum;
using Clock = std::chrono::steady_clock;

namespace {

int g_failed = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("%s  %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  g_failed += !ok;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Runs a criterion body; an exception counts as a failure with its message.
void guarded(int id, const char* name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

// ---------------------------------------------------------------- 1 --

nn::LayerParams<double> random_params(nn::LayerKind kind, const nn::LayerShape& shape,
                                      std::uint64_t seed) {
  auto p = nn::init_params<double>(kind, shape, {nn::InitMode::kGlorot}, seed);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> d(-0.2, 0.2);
  for (auto& w : p.weights) {
    if (w.cols == 1) {
      for (auto& x : w.data) x += d(rng);
    }
  }
  return p;
}

struct GradTally {
  std::map<std::string, std::size_t> instances;
  double worst = 0.0;
  void add(const std::string& kind, std::initializer_list<testing::GradCheckResult> rs) {
    ++instances[kind];
    for (const auto& r : rs) worst = std::max(worst, r.max_rel_error);
  }
};

void criterion_gradients() {
  const auto t0 = Clock::now();
  GradTally tally;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(100 + s);
    const std::size_t in = 2 + s % 3, out = 2 + (s + 1) % 3;
    const auto act = std::array{nn::Activation::kIdentity, nn::Activation::kTanh,
                                nn::Activation::kSoftmax}[s % 3];
    auto p = random_params(nn::LayerKind::kDense, {in, out}, s);
    auto x = random_matrix(1, in, rng);
    auto c = random_matrix(1, out, rng);
    auto loss = [&] {
      auto y = nn::dense_forward<double>(p, x.data, act);
      return std::inner_product(y.begin(), y.end(), c.data.begin(), 0.0);
    };
    auto y = nn::dense_forward<double>(p, x.data, act);
    auto g = p.zeros_like();
    Matrix<double> dx(1, in);
    nn::dense_backward<double>(p, x.data, y, act, c.data, g, dx.data);
    tally.add("dense", {check_layer(p, g, loss), check_matrix(x, dx, loss)});
  }
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(200 + s);
    auto p = random_params(nn::LayerKind::kGru, {3, 4, 2}, s);
    auto x = random_matrix(2 + s % 3, 3, rng);
    auto c = random_matrix(x.rows, 4, rng);
    auto loss = [&] { return weighted_sum(nn::gru_forward<double>(p, x).top(), c); };
    nn::GruTape<double> tape;
    nn::gru_forward<double>(p, x, {}, &tape);
    auto g = p.zeros_like();
    Matrix<double> dx;
    nn::gru_backward<double>(p, tape, c, g, &dx);
    tally.add("gru", {check_layer(p, g, loss), check_matrix(x, dx, loss)});
  }
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(300 + s);
    auto p = random_params(nn::LayerKind::kBiLstm, {3, 4, 2}, s);
    auto x = random_matrix(2 + s % 3, 3, rng);
    auto cf = random_matrix(x.rows, 4, rng);
    auto cb = random_matrix(x.rows, 4, rng);
    auto loss = [&] {
      auto o = nn::bilstm_forward<double>(p, x);
      return weighted_sum(o.fwd, cf) + weighted_sum(o.bwd, cb);
    };
    nn::BiLstmTape<double> tape;
    nn::bilstm_forward<double>(p, x, &tape);
    auto g = p.zeros_like();
    Matrix<double> dx;
    nn::bilstm_backward<double>(p, tape, cf, cb, g, &dx);
    tally.add("bilstm", {check_layer(p, g, loss), check_matrix(x, dx, loss)});
  }
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(400 + s);
    auto p = random_params(nn::LayerKind::kConvMaxPool, {3, 3, 1, {1, 2, 3}}, s);
    auto x = random_matrix(3 + s % 3, 3, rng);
    std::vector<double> c(9);
    for (auto& v : c) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    auto loss = [&] {
      auto o = nn::conv_maxpool_forward<double>(p, x);
      return std::inner_product(o.begin(), o.end(), c.begin(), 0.0);
    };
    nn::ConvTape<double> tape;
    nn::conv_maxpool_forward<double>(p, x, &tape);
    auto g = p.zeros_like();
    Matrix<double> dx;
    nn::conv_maxpool_backward<double>(p, tape, c, g, &dx);
    tally.add("conv", {check_layer(p, g, loss), check_matrix(x, dx, loss)});
  }
  for (std::uint64_t s = 1; s <= 5; ++s) {
    std::mt19937_64 rng(500 + s);
    auto emb = nn::init_params<double>(nn::LayerKind::kEmbedding, {7, 3},
                                       {nn::InitMode::kUniform, 0.5}, s);
    auto gru = random_params(nn::LayerKind::kGru, {3, 4, 2}, s + 50);
    std::vector<std::size_t> ids;
    for (int k = 0; k < 4; ++k) ids.push_back(rng() % 7);
    ids.push_back(ids[0]);  // a repeated row accumulates
    auto c = random_matrix(ids.size(), 4, rng);
    auto loss = [&] {
      return weighted_sum(nn::gru_forward<double>(gru, nn::embedding_forward(emb, ids)).top(),
                          c);
    };
    nn::GruTape<double> tape;
    nn::gru_forward<double>(gru, nn::embedding_forward(emb, ids), {}, &tape);
    auto gg = gru.zeros_like();
    Matrix<double> dx;
    nn::gru_backward<double>(gru, tape, c, gg, &dx);
    auto ge = emb.zeros_like();
    nn::embedding_backward<double>(ids, dx, ge);
    tally.add("embedding", {check_layer(emb, ge, loss, 1e-5, 100)});
  }
  std::size_t total = 0;
  std::string kinds;
  for (const auto& [k, n] : tally.instances) {
    total += n;
    kinds += (kinds.empty() ? "" : ",") + k + "=" + std::to_string(n);
  }
  const double secs = seconds_since(t0);
  report(1, "gradient suite",
         tally.worst <= 1e-4 && total >= 20 && tally.instances.size() == 5 && secs < 60.0,
         fmt("max rel err %.2e over %zu instances (%s), %.1fs", tally.worst, total,
             kinds.c_str(), secs));
}

// ---------------------------------------------------------------- 2 --

void criterion_metrics() {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> cls(0, 2), len(1, 60);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::size_t> g(len(rng)), p(g.size());
    for (auto& x : g) x = cls(rng);
    for (auto& x : p) x = cls(rng);
    const auto r = eval::compute_metrics(g, p, 3);
    // Brute force from direct scans of the two vectors.
    double mp = 0, mr = 0, mf = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      double tp = 0, pc = 0, gc = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        tp += g[i] == c && p[i] == c;
        pc += p[i] == c;
        gc += g[i] == c;
      }
      const double prec = pc == 0 ? 0.0 : tp / pc;
      const double rec = gc == 0 ? 0.0 : tp / gc;
      const double f1 = prec + rec == 0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
      mismatches += r.per_class[c].precision != prec || r.per_class[c].recall != rec ||
                    r.per_class[c].f1 != f1;
      mp += prec;
      mr += rec;
      mf += f1;
    }
    mismatches += r.macro_precision != mp / 3 || r.macro_recall != mr / 3 ||
                  r.macro_f1 != mf / 3;
  }
  // Per-class precision [1.0, 0.5].
  const std::vector<std::size_t> g{0, 1, 0}, p{0, 1, 1};
  const double macro = eval::compute_metrics(g, p, 2).macro_precision;
  report(2, "metric oracle", mismatches == 0 && macro == 0.75,
         fmt("%zu mismatches over 1000 vectors, macro P of [1.0, 0.5] = %.4f", mismatches,
             macro));
}

// ---------------------------------------------------------------- 3 --

void criterion_ttest() {
  std::vector<double> d(10), zero(10, 0.0);
  std::iota(d.begin(), d.end(), 1.0);
  const auto r = eval::paired_t_test(d, zero);
  const bool ok = std::abs(r.t - 5.744) <= 0.001 && std::abs(r.p - 2.8e-4) <= 0.05 * 2.8e-4;
  report(3, "paired t-test", ok, fmt("t = %.4f, p = %.4e, df = %zu", r.t, r.p, r.df));
}

// ---------------------------------------------------------------- 4 --

std::vector<text::NormalizedText> normalize_docs(const std::vector<bench::Document>& docs) {
  std::vector<text::NormalizedText> out;
  for (const auto& d : docs) {
    out.push_back(text::normalize_and_tokenize(d.text, text::default_stopwords()));
  }
  return out;
}

void criterion_separability() {
  const auto t0 = Clock::now();
  bench::CorpusSpec spec;
  // Flat lexicon of three markers per class, no rare tail.
  spec.stems_per_class = 3;
  spec.suffixes = {""};
  spec.marker_zipf = 0.0;
  spec.train_size = 200;
  spec.test_size = 1;
  spec.seed = 4;
  const auto corpus = bench::generate_corpus(spec);
  const auto texts = normalize_docs(corpus.train);
  std::vector<std::size_t> labels;
  for (const auto& d : corpus.train) labels.push_back(d.label);
  models::PipelineConfig pc;
  pc.recurrent.max_epochs = 50;
  const std::vector<models::Method> ms{models::Method::kHs};
  const auto comps = models::train_components(ms, texts, labels, 3, pc);
  std::size_t ok = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto p = models::predict(models::Method::kHs, comps, texts[i]);
    ok += static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin()) ==
          labels[i];
  }
  const double acc = static_cast<double>(ok) / static_cast<double>(texts.size());
  const std::size_t epochs = comps.recurrent->history.size();
  const double secs = seconds_since(t0);
  report(4, "hs separability", acc >= 0.95 && epochs <= 50 && secs < 300.0,
         fmt("training accuracy %.3f on %zu docs after %zu epochs, %.1fs", acc, texts.size(),
             epochs, secs));
}

// ---------------------------------------------------------------- 5 --

// Syllable words whose tuned vectors are sums of random character-bigram
// vectors (with ^ and $ boundary marks), so spelling determines the target.
struct SpelledVocab {
  text::WordVocab vocab;
  embed::EmbeddingTable table;
};

SpelledVocab spelled_vocab() {
  std::mt19937_64 rng(7);
  const std::string cons = "bcdfgklmnprstvz", vow = "aeiou";
  std::vector<std::string> words;
  std::vector<std::uint64_t> freq;
  std::set<std::string> seen;
  while (words.size() < 200) {
    std::string w;
    const int syl = 2 + static_cast<int>(rng() % 2);
    for (int s = 0; s < syl; ++s) {
      w += cons[rng() % cons.size()];
      w += vow[rng() % vow.size()];
    }
    if (!seen.insert(w).second) continue;
    words.push_back(w);
    freq.push_back(1 + rng() % 20);
  }
  const std::size_t d = 32;
  auto vocab = text::WordVocab::from_entries(words, freq);
  auto table = embed::random_table(vocab, d, 1);
  std::map<std::string, std::vector<float>> gram;
  std::normal_distribution<float> nd(0, 1);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string w = "^" + words[i] + "$";
    std::vector<float> v(d, 0.0f);
    for (std::size_t k = 0; k + 2 <= w.size(); ++k) {
      auto& g = gram[w.substr(k, 2)];
      if (g.empty()) {
        for (std::size_t j = 0; j < d; ++j) g.push_back(nd(rng));
      }
      for (std::size_t j = 0; j < d; ++j) v[j] += g[j];
    }
    double n = 0;
    for (float x : v) n += x * x;
    n = std::sqrt(n);
    for (std::size_t j = 0; j < d; ++j) table.matrix()(i, j) = static_cast<float>(v[j] / n * 0.5);
  }
  return {std::move(vocab), std::move(table)};
}

void criterion_composition() {
  const auto t0 = Clock::now();
  const auto sv = spelled_vocab();
  models::CompositionConfig cc;
  cc.hidden = 128;
  cc.tanh_hidden = 256;
  cc.max_epochs = 60;
  cc.patience = 10;
  const auto m = models::train_composition(sv.table, sv.vocab, cc);
  double sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < sv.vocab.size(); ++i) {
    if (sv.vocab.frequency(i) < 5) continue;
    sum += embed::cosine(models::compose(m, sv.vocab.word(i)), sv.table.row(i));
    ++n;
  }
  const double mean = sum / static_cast<double>(n);
  const double secs = seconds_since(t0);
  report(5, "composition reconstruction", mean >= 0.9 && secs < 600.0,
         fmt("mean cosine %.4f over %zu words with frequency >= 5, %zu epochs, %.1fs", mean, n,
             m.history.size(), secs));

  // Unseen leet variants against the shared OOV row, 30 words.
  const auto leet = std::vector{bench::ObfuscationOp::of(bench::OpKind::kLeet)};
  std::size_t tried = 0, closer = 0;
  const auto oov = sv.table.row(sv.vocab.oov_index());
  for (std::size_t i = 0; i < sv.vocab.size() && tried < 30; ++i) {
    const auto& w = sv.vocab.word(i);
    const auto obf = bench::obfuscate(w, leet, 1000 + i);
    if (!obf.obfuscated || sv.vocab.contains(obf.word)) continue;
    ++tried;
    closer += embed::cosine(models::compose(m, obf.word), sv.table.row(i)) >
              embed::cosine(oov, sv.table.row(i));
  }
  const double frac = static_cast<double>(closer) / static_cast<double>(tried);
  std::printf("%s     %-28s %s\n", tried == 30 && frac >= 0.8 ? "PASS" : "FAIL",
              "(5) leet variants vs OOV row",
              fmt("composed closer than the OOV row for %zu of %zu", closer, tried).c_str());
  g_failed += !(tried == 30 && frac >= 0.8);
}

// ---------------------------------------------------------------- 6 --

void criterion_benchmark() {
  const auto t0 = Clock::now();
  using models::Method;
  const std::vector<Method> ms{Method::kWs, Method::kWsCng, Method::kAugmentedWsCng};
  bench::CorpusSpec spec;
  spec.obfuscation_rate = 0.8;
  auto bc = bench::desk_config();
  bc.repeats = 5;
  const auto r = bench::run_benchmark(ms, spec, bc);
  const double ws = r.methods[0].mean.macro_f1;
  const double cng = r.methods[1].mean.macro_f1;
  const double aug = r.methods[2].mean.macro_f1;
  double p_cng_ws = 1.0, p_aug_cng = 1.0;
  for (const auto& pr : r.pairs) {
    if (pr.a == Method::kWs && pr.b == Method::kWsCng) p_cng_ws = pr.test.p;
    if (pr.a == Method::kWsCng && pr.b == Method::kAugmentedWsCng) p_aug_cng = pr.test.p;
  }
  const double secs = seconds_since(t0);
  const bool ok = aug - cng >= 0.05 && cng - ws >= 0.03 && p_aug_cng < 0.05 &&
                  p_cng_ws < 0.05 && secs < 1800.0;
  report(6, "obfuscation benchmark", ok,
         fmt("macro F1 ws %.4f, ws-cng %.4f (p %.2e), augmented %.4f (p %.2e), %.1fs", ws, cng,
             p_cng_ws, aug, p_aug_cng, secs));
}

// ---------------------------------------------------------------- 7 --

void criterion_noop() {
  using models::Method;
  bench::CorpusSpec spec;
  spec.obfuscation_rate = 0.0;
  spec.train_size = 90;
  spec.test_size = 60;
  spec.seed = 3;
  const auto corpus = bench::generate_corpus(spec);
  const auto train = normalize_docs(corpus.train);
  const auto test = normalize_docs(corpus.test);
  std::vector<std::size_t> labels;
  for (const auto& d : corpus.train) labels.push_back(d.label);
  models::PipelineConfig pc;
  pc.recurrent.hidden = 16;
  pc.recurrent.max_epochs = 5;
  pc.composition.hidden = 16;
  pc.composition.tanh_hidden = 16;
  pc.composition.max_epochs = 2;
  pc.gbdt.rounds = 5;
  const std::vector<Method> ms{Method::kHsCng, Method::kAugmentedHsCng, Method::kWsCng,
                               Method::kAugmentedWsCng};
  const auto comps = models::train_components(ms, train, labels, 3, pc);
  std::size_t docs = 0, differ = 0;
  for (const auto* split : {&train, &test}) {
    for (const auto& t : *split) {
      ++docs;
      differ += models::build_feature_bundle(Method::kAugmentedHsCng, t, comps).values !=
                models::build_feature_bundle(Method::kHsCng, t, comps).values;
      differ += models::build_feature_bundle(Method::kAugmentedWsCng, t, comps).values !=
                models::build_feature_bundle(Method::kWsCng, t, comps).values;
    }
  }
  report(7, "rate-0 bundle equivalence", differ == 0 && docs == 150,
         fmt("%zu differing bundles over %zu documents x 2 families", differ, docs));
}

// ---------------------------------------------------------------- 8 --

double monotone(std::size_t j, double v) {
  switch (j % 4) {
    case 0: return std::exp(2.0 * v);
    case 1: return v * v * v + v;
    case 2: return std::atan(v) - 5.0;
    default: return 3.0 * v + 11.0;
  }
}

void criterion_gbdt() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::size_t diff_pred = 0, rises = 0, tree_mismatch = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 40 + rng() % 60, f = 2 + rng() % 5, classes = 2 + rng() % 3;
    Matrix<double> x(n, f), tx(n, f);
    std::vector<std::size_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < f; ++j) {
        x(i, j) = u(rng) < 0.3 ? 0.0 : u(rng);
        s += x(i, j) * static_cast<double>(j + 1);
      }
      y[i] = static_cast<std::size_t>(std::clamp(s + 0.5 * u(rng) + 1.0, 0.0, 1.999) *
                                       static_cast<double>(classes) / 2.0);
      y[i] = std::min(y[i], classes - 1);
    }
    y[0] = 0;
    y[1] = classes - 1;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < f; ++j) tx(i, j) = monotone(j, x(i, j));
    }
    gbdt::GbdtConfig cfg;
    cfg.rounds = 10 + rng() % 15;
    cfg.max_depth = 1 + rng() % 4;
    cfg.min_leaf = 1 + rng() % 4;
    cfg.learning_rate = 0.05 + 0.5 * (u(rng) + 1.0);
    const auto a = gbdt::train(x, y, cfg, classes);
    const auto b = gbdt::train(tx, y, cfg, classes);
    for (std::size_t i = 0; i < n; ++i) diff_pred += a.predict(x.row(i)) != b.predict(tx.row(i));
    tree_mismatch += a.trees.size() != b.trees.size();
    for (std::size_t r = 1; r < a.train_loss.size(); ++r) {
      rises += a.train_loss[r] > a.train_loss[r - 1];
    }
    for (std::size_t r = 1; r < b.train_loss.size(); ++r) {
      rises += b.train_loss[r] > b.train_loss[r - 1];
    }
  }
  report(8, "gbdt invariance", diff_pred == 0 && rises == 0 && tree_mismatch == 0,
         fmt("%zu differing predictions, %zu loss increases over 50 datasets", diff_pred, rises));
}

// ---------------------------------------------------------------- 9 --

harness::RunConfig small_run(std::vector<models::Method> methods) {
  harness::RunConfig c;
  c.methods = std::move(methods);
  harness::apply_config_text(c, R"(
embedding_dim = 8
hidden = 12
max_epochs = 6
c2w_char_hidden = 6
composer = lstm
composer_hidden = 8
composer_tanh_hidden = 8
encoder_hidden = 6
composer_max_epochs = 3
gbdt_rounds = 8
gbdt_min_leaf = 2
folds = 3
)");
  return c;
}

harness::Dataset bench_dataset(std::size_t n, std::uint64_t seed, bool test, double rate) {
  bench::CorpusSpec s;
  s.train_size = n;
  s.test_size = n;
  s.obfuscation_rate = rate;
  s.seed = seed;
  return harness::to_dataset(bench::generate_corpus(s), test);
}

void criterion_persistence() {
  const std::vector<models::Method> all(std::begin(models::kAllMethods),
                                        std::end(models::kAllMethods));
  const auto d = bench_dataset(60, 5, false, 0.8);
  const auto m = harness::train_model(d, small_run(all));
  const auto path = (std::filesystem::temp_directory_path() / "oovc_acceptance.oovf").string();
  harness::save_model(path, m);
  const auto back = harness::load_model(path);
  std::filesystem::remove(path);

  const auto probes = bench_dataset(100, 6, true, 0.8);
  std::size_t compared = 0, differ = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    for (auto method : all) {
      ++compared;
      differ += harness::predict_text(m, method, probes.records[i].text) !=
                harness::predict_text(back, method, probes.records[i].text);
    }
  }

  const std::string bytes = harness::encode_container(m);
  std::vector<std::string> bad;
  for (std::size_t k = 1; k <= 20; ++k) {
    std::string b = bytes;
    b[bytes.size() * k / 21] ^= 0x21;
    bad.push_back(b);
  }
  bad.push_back(bytes.substr(0, bytes.size() / 2));
  bad.push_back(bytes.substr(0, 7));
  std::string v = bytes;
  v[4] = static_cast<char>(harness::kContainerVersion + 1);
  bad.push_back(v);
  std::size_t rejected = 0;
  for (const auto& b : bad) {
    try {
      harness::decode_container(b);
    } catch (const ContainerError&) {
      ++rejected;
    }
  }
  report(9, "persistence", differ == 0 && compared == 100 * all.size() &&
                               rejected == bad.size() && harness::encode_container(back) == bytes,
         fmt("%zu of %zu predictions differ (100 probes x %zu methods), %zu of %zu corrupt "
             "containers rejected",
             differ, compared, all.size(), rejected, bad.size()));
}

// --------------------------------------------------------------- 10 --

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void criterion_cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "oovc_acceptance_cli";
  fs::create_directories(dir);
  harness::save_dataset((dir / "data.tsv").string(), bench_dataset(90, 9, false, 0.8));
  std::ofstream((dir / "run.cfg").string()) << to_config_text(small_run({models::Method::kWs})) << "folds = 5\n";
  std::string outputs[2];
  int status[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = dir / ("cv" + std::to_string(k) + ".tsv");
    const std::string cmd = std::string("\"") + OOVC_CLI_PATH + "\" cv --quiet --config \"" +
                            (dir / "run.cfg").string() + "\" --data \"" +
                            (dir / "data.tsv").string() +
                            "\" --method ws,ws-cng,augmented-ws-cng --baseline ws --seed 11"
                            " --jobs 2 > \"" +
                            out.string() + "\"";
    status[k] = std::system(cmd.c_str());
    outputs[k] = slurp(out);
  }
  fs::remove_all(dir);
  const bool ok = status[0] == 0 && status[1] == 0 && !outputs[0].empty() &&
                  outputs[0] == outputs[1];
  report(10, "cli cv determinism", ok,
         fmt("exit %d/%d, %zu and %zu bytes, %s", status[0], status[1], outputs[0].size(),
             outputs[1].size(), outputs[0] == outputs[1] ? "identical" : "different"));
}

}  // namespace

int main(int argc, char** argv) {
  // Optional criterion numbers to run a subset.
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::pair<const char*, void (*)()>>> all{
      {1, {"gradient suite", criterion_gradients}},
      {2, {"metric oracle", criterion_metrics}},
      {3, {"paired t-test", criterion_ttest}},
      {4, {"hs separability", criterion_separability}},
      {5, {"composition reconstruction", criterion_composition}},
      {6, {"obfuscation benchmark", criterion_benchmark}},
      {7, {"rate-0 bundle equivalence", criterion_noop}},
      {8, {"gbdt invariance", criterion_gbdt}},
      {9, {"persistence", criterion_persistence}},
      {10, {"cli cv determinism", criterion_cli_determinism}},
  };
  for (const auto& [id, entry] : all) {
    if (!only.empty() && !only.count(id)) continue;
    guarded(id, entry.first, entry.second);
  }
  std::printf("%s\n", g_failed ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
  return g_failed ? 1 : 0;
}
