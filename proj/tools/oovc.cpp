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

// Command-line front end: train, evaluate, cv, predict, compose, neighbors,
// bench and stats. Results go to stdout, logs to stderr.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oovc/error.hpp"
#include "oovc/harness.hpp"

using namespace oovc;
using harness::RunConfig;

namespace {

bool g_quiet = false;

void log(const std::string& msg) {
  if (!g_quiet) std::cerr << "[oovc] " << msg << "\n";
}

// Flags shared by the training-style subcommands. Config file first, then
// --set pairs, then dedicated flags.
struct CommonFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::string> methods;
  std::string data;
  std::string embeddings;
  std::string stopwords;

  void add(CLI::App* app, bool need_data) {
    app->add_option("--config", config_file, "key = value configuration file");
    app->add_option("--set", sets, "override one config key (key=value), repeatable");
    app->add_option("--method,-m", methods, "method tag(s), comma separated or repeated")
        ->delimiter(',');
    auto* d = app->add_option("--data,-d", data, "dataset TSV (id, label, text)");
    if (need_data) d->required();
    app->add_option("--embeddings,-e", embeddings, "pretrained embedding text file");
    app->add_option("--stopwords", stopwords, "stopword list, one per line");
  }

  RunConfig resolve(RunConfig base, std::uint64_t seed, bool seed_set, std::size_t jobs,
                    bool jobs_set) const {
    if (!config_file.empty()) harness::apply_config_file(base, config_file);
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      harness::set_config_value(base, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!methods.empty()) {
      base.methods.clear();
      for (const auto& m : methods) base.methods.push_back(models::parse_method(m));
    }
    if (!data.empty()) base.data = data;
    if (!embeddings.empty()) base.embeddings = embeddings;
    if (!stopwords.empty()) base.stopwords = stopwords;
    if (seed_set) base.seed = seed;
    if (jobs_set) base.jobs = jobs;
    harness::validate(base);
    return base;
  }
};

void print_reports(const std::vector<harness::MethodReport>& reports,
                   const std::vector<std::string>& labels) {
  for (const auto& r : reports) {
    eval::write_metrics_tsv(std::cout, models::to_string(r.method), r.report, labels);
  }
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string elapsed(std::chrono::steady_clock::time_point t0) {
  return fixed(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1) +
         "s";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abuse classifiers with composed embeddings for unseen words"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  auto* jobs_opt = app.add_option("--jobs,-j", jobs, "parallel folds")->check(CLI::PositiveNumber);
  app.add_flag("--quiet,-q", g_quiet, "no log output");
  // Options are accepted before or after the subcommand.
  app.fallthrough();

  CommonFlags train_f, eval_f, cv_f;
  std::string train_out;
  auto* train = app.add_subcommand("train", "fit methods and write a model container");
  train_f.add(train, true);
  train->add_option("--out,-o", train_out, "container path")->required();

  auto* evaluate = app.add_subcommand("evaluate", "stratified 60:40 holdout evaluation");
  eval_f.add(evaluate, true);

  std::string baseline;
  std::size_t folds = 0;
  auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  cv_f.add(cv, true);
  cv->add_option("--folds,-k", folds, "fold count (default from config: 10)");
  cv->add_option("--baseline,-b", baseline, "method tag to t-test against");

  std::string model_path, predict_method;
  auto* predict = app.add_subcommand("predict", "classify lines of standard input");
  predict->add_option("--model", model_path, "container path")->required();
  predict->add_option("--method,-m", predict_method, "method (default: first in the model)");

  std::string word;
  std::size_t k = 0;
  auto* compose = app.add_subcommand("compose", "composed vector for a word");
  compose->add_option("--model", model_path, "container path")->required();
  compose->add_option("--word,-w", word, "word to compose")->required();
  compose->add_option("--neighbors,-n", k, "print this many neighbours instead");

  std::size_t nk = 10;
  auto* neighbors = app.add_subcommand("neighbors", "nearest tuned embeddings of a word");
  neighbors->add_option("--model", model_path, "container path")->required();
  neighbors->add_option("--word,-w", word, "query word")->required();
  neighbors->add_option("-k", nk, "neighbour count")->check(CLI::PositiveNumber);

  CommonFlags bench_f;
  std::size_t repeats = 5, train_size = 0, test_size = 0;
  double rate = 0.8;
  std::string corpus_dir;
  auto* bench = app.add_subcommand("bench", "synthetic obfuscation benchmark");
  bench_f.add(bench, false);
  bench->add_option("--repeats,-r", repeats, "seeds per method")->check(CLI::PositiveNumber);
  bench->add_option("--rate", rate, "test-marker obfuscation rate")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--train-size", train_size, "training documents");
  bench->add_option("--test-size", test_size, "test documents");
  bench->add_option("--write-corpus", corpus_dir, "write the first seed's corpus here");

  std::string wordlist;
  std::string stats_data, stats_stop;
  auto* stats = app.add_subcommand("stats", "tokens absent from a dictionary word list");
  stats->add_option("--data,-d", stats_data, "dataset TSV")->required();
  stats->add_option("--wordlist", wordlist, "one word per line")->required();
  stats->add_option("--stopwords", stats_stop, "stopword list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    if (e.get_exit_code() == 0) return 0;
    std::cerr << app.help();
    return 1;
  }
  const bool seed_set = seed_opt->count() > 0;
  const bool jobs_set = jobs_opt->count() > 0;

  try {
    const auto t0 = std::chrono::steady_clock::now();
    if (train->parsed()) {
      const auto cfg = train_f.resolve({}, seed, seed_set, jobs, jobs_set);
      const auto d = harness::load_dataset(cfg.data);
      log("training " + std::to_string(cfg.methods.size()) + " method(s) on " +
          std::to_string(d.records.size()) + " records");
      const auto m = harness::train_model(d, cfg);
      harness::save_model(train_out, m);
      log("wrote " + train_out + " in " + elapsed(t0));
    } else if (evaluate->parsed()) {
      const auto cfg = eval_f.resolve({}, seed, seed_set, jobs, jobs_set);
      const auto d = harness::load_dataset(cfg.data);
      print_reports(harness::evaluate_holdout(d, cfg), d.labels);
      log("done in " + elapsed(t0));
    } else if (cv->parsed()) {
      auto cfg = cv_f.resolve({}, seed, seed_set, jobs, jobs_set);
      if (folds) cfg.folds = folds;
      harness::validate(cfg);
      std::optional<models::Method> base;
      if (!baseline.empty()) base = models::parse_method(baseline);
      const auto d = harness::load_dataset(cfg.data);
      log(std::to_string(cfg.folds) + "-fold cross-validation on " +
          std::to_string(d.records.size()) + " records");
      const auto r = harness::cross_validate(d, cfg, base);
      for (const auto& m : r.methods) {
        for (std::size_t f = 0; f < m.report.fold_scores.size(); ++f) {
          std::cout << models::to_string(m.method) << "\tfold" << f + 1 << "\tmacro_f1\t"
                    << fixed(m.report.fold_scores[f]) << "\n";
        }
      }
      for (const auto& m : r.methods) {
        eval::write_metrics_tsv(std::cout, models::to_string(m.method), m.report, d.labels);
      }
      if (r.baseline) {
        for (std::size_t i = 0; i < r.methods.size(); ++i) {
          if (r.methods[i].method == *r.baseline) continue;
          std::cout << "ttest\t" << models::to_string(r.methods[i].method) << "\t"
                    << models::to_string(*r.baseline) << "\t" << fixed(r.tests[i].t) << "\t"
                    << fixed(r.tests[i].p, 8) << "\n";
        }
      }
      log("done in " + elapsed(t0));
    } else if (predict->parsed()) {
      const auto m = harness::load_model(model_path);
      const auto method = predict_method.empty() ? m.methods.front()
                                                 : models::parse_method(predict_method);
      if (std::find(m.methods.begin(), m.methods.end(), method) == m.methods.end()) {
        throw InvalidConfigError(std::string("model was not trained for method ") +
                                 models::to_string(method));
      }
      std::string line;
      while (std::getline(std::cin, line)) {
        const auto p = harness::predict_text(m, method, line);
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.size(); ++c) best = p[c] > p[best] ? c : best;
        std::cout << m.labels[best];
        for (double v : p) std::cout << '\t' << fixed(v);
        std::cout << '\n';
      }
    } else if (compose->parsed()) {
      const auto m = harness::load_model(model_path);
      const auto& c = m.components;
      if (!c.composition) throw InvalidConfigError("model has no composition model");
      const auto v = models::compose(*c.composition, word);
      if (k == 0) {
        for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? " " : "") << fixed(v[i]);
        std::cout << "\n";
      } else {
        for (const auto& n :
             embed::nearest_neighbors(c.recurrent->embeddings, c.vocab, v, k)) {
          std::cout << n.token << "\t" << fixed(n.cosine) << "\n";
        }
      }
    } else if (neighbors->parsed()) {
      const auto m = harness::load_model(model_path);
      const auto& c = m.components;
      if (!c.recurrent) throw InvalidConfigError("model has no word embeddings");
      std::vector<embed::Neighbor> out;
      if (!c.vocab.contains(word) && c.composition) {
        log("'" + word + "' is unseen; querying with its composed vector");
        out = embed::nearest_neighbors(c.recurrent->embeddings, c.vocab,
                                       models::compose(*c.composition, word), nk);
      } else {
        out = embed::nearest_neighbors(c.recurrent->embeddings, c.vocab, word, nk);
      }
      for (const auto& n : out) std::cout << n.token << "\t" << fixed(n.cosine) << "\n";
    } else if (bench->parsed()) {
      const auto desk = bench::desk_config();
      RunConfig base;
      base.methods = {models::Method::kWs, models::Method::kWsCng,
                      models::Method::kAugmentedWsCng};
      base.pipeline = desk.pipeline;
      const auto cfg = bench_f.resolve(base, seed, seed_set, jobs, jobs_set);
      bench::CorpusSpec spec;
      spec.obfuscation_rate = rate;
      if (train_size) spec.train_size = train_size;
      if (test_size) spec.test_size = test_size;
      bench::BenchConfig bc;
      bc.pipeline = cfg.pipeline;
      bc.repeats = repeats;
      bc.base_seed = cfg.seed;
      if (!corpus_dir.empty()) {
        spec.seed = cfg.seed;
        const auto corpus = bench::generate_corpus(spec);
        std::filesystem::create_directories(corpus_dir);
        harness::save_dataset(corpus_dir + "/train.tsv", harness::to_dataset(corpus, false));
        harness::save_dataset(corpus_dir + "/test.tsv", harness::to_dataset(corpus, true));
        log("wrote corpus to " + corpus_dir);
      }
      log("benchmark: " + std::to_string(cfg.methods.size()) + " method(s), " +
          std::to_string(repeats) + " seed(s), obfuscation rate " + fixed(rate, 2));
      const auto r = bench::run_benchmark(cfg.methods, spec, bc);
      std::cout << "method\tmacro_p\tmacro_r\tmacro_f1\tseed_f1\n";
      for (const auto& m : r.methods) {
        std::cout << models::to_string(m.method) << "\t" << fixed(m.mean.macro_precision) << "\t"
                  << fixed(m.mean.macro_recall) << "\t" << fixed(m.mean.macro_f1) << "\t";
        for (std::size_t i = 0; i < m.seed_scores.size(); ++i) {
          std::cout << (i ? "," : "") << fixed(m.seed_scores[i], 4);
        }
        std::cout << "\n";
      }
      for (const auto& p : r.pairs) {
        std::cout << "ttest\t" << models::to_string(p.a) << "\t" << models::to_string(p.b) << "\t"
                  << fixed(p.mean_difference) << "\t" << fixed(p.test.t) << "\t"
                  << fixed(p.test.p, 8) << "\n";
      }
      if (r.composition) {
        std::cout << "composition\ttokens\t" << r.composition->tokens << "\timproved\t"
                  << r.composition->improved << "\tcosine\t"
                  << fixed(r.composition->mean_composed_cosine) << "\toov_cosine\t"
                  << fixed(r.composition->mean_oov_cosine) << "\n";
      }
      log("done in " + elapsed(t0));
    } else if (stats->parsed()) {
      const auto d = harness::load_dataset(stats_data);
      const auto sw = stats_stop.empty() ? text::default_stopwords()
                                         : text::load_stopwords(stats_stop);
      const auto s = harness::dictionary_oov_stats(d, wordlist, sw);
      std::cout << "all\t" << s.unique_tokens << "\t" << s.absent_tokens << "\t"
                << fixed(s.absent_fraction) << "\n";
      for (std::size_t c = 0; c < d.labels.size(); ++c) {
        const double f = s.class_unique[c]
                             ? static_cast<double>(s.class_absent[c]) /
                                   static_cast<double>(s.class_unique[c])
                             : 0.0;
        std::cout << d.labels[c] << "\t" << s.class_unique[c] << "\t" << s.class_absent[c]
                  << "\t" << fixed(f) << "\n";
      }
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return harness::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
