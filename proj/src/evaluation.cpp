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

#include "oovc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "oovc/error.hpp"

namespace oovc::eval {

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::gold_count(std::size_t cls) const {
  std::uint64_t s = 0;
  for (std::size_t p = 0; p < classes; ++p) s += at(cls, p);
  return s;
}

std::uint64_t ConfusionMatrix::predicted_count(std::size_t cls) const {
  std::uint64_t s = 0;
  for (std::size_t g = 0; g < classes; ++g) s += at(g, cls);
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> gold,
                                 std::span<const std::size_t> predicted,
                                 std::size_t classes) {
  if (gold.size() != predicted.size()) {
    throw InvalidInputError("gold and predicted label counts differ");
  }
  ConfusionMatrix cm{classes, std::vector<std::uint64_t>(classes * classes, 0)};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= classes || predicted[i] >= classes) {
      throw InvalidInputError("label outside 0.." + std::to_string(classes - 1) +
                              " at position " + std::to_string(i));
    }
    ++cm.counts[gold[i] * classes + predicted[i]];
  }
  return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MetricsReport compute_metrics(std::span<const std::size_t> gold,
                              std::span<const std::size_t> predicted,
                              std::size_t classes) {
  if (classes < 2) {
    throw InvalidInputError("metrics need at least two classes");
  }
  MetricsReport r;
  r.confusion = confusion_matrix(gold, predicted, classes);
  r.per_class.resize(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::uint64_t tp = r.confusion.at(c, c);
    auto& m = r.per_class[c];
    m.precision = ratio(tp, r.confusion.predicted_count(c));
    m.recall = ratio(tp, r.confusion.gold_count(c));
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    r.macro_precision += m.precision;
    r.macro_recall += m.recall;
    r.macro_f1 += m.f1;
  }
  const double n = static_cast<double>(classes);
  r.macro_precision /= n;
  r.macro_recall /= n;
  r.macro_f1 /= n;
  return r;
}

MetricsReport average_reports(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw InvalidInputError("no reports to average");
  const std::size_t classes = reports.front().per_class.size();
  MetricsReport out;
  out.per_class.resize(classes);
  out.confusion = {classes, std::vector<std::uint64_t>(classes * classes, 0)};
  for (const auto& r : reports) {
    if (r.per_class.size() != classes) {
      throw InvalidInputError("reports disagree on the class count");
    }
    for (std::size_t c = 0; c < classes; ++c) {
      out.per_class[c].precision += r.per_class[c].precision;
      out.per_class[c].recall += r.per_class[c].recall;
      out.per_class[c].f1 += r.per_class[c].f1;
    }
    out.macro_precision += r.macro_precision;
    out.macro_recall += r.macro_recall;
    out.macro_f1 += r.macro_f1;
    out.fold_scores.push_back(r.macro_f1);
    for (std::size_t i = 0; i < r.confusion.counts.size(); ++i) {
      out.confusion.counts[i] += r.confusion.counts[i];
    }
  }
  const double n = static_cast<double>(reports.size());
  for (auto& m : out.per_class) {
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
  }
  out.macro_precision /= n;
  out.macro_recall /= n;
  out.macro_f1 /= n;
  return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (f == fold) continue;
    out.insert(out.end(), folds[f].begin(), folds[f].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::vector<std::vector<std::size_t>> group_by_class(
    std::span<const std::size_t> labels) {
  std::size_t classes = 0;
  for (std::size_t l : labels) classes = std::max(classes, l + 1);
  std::vector<std::vector<std::size_t>> groups(classes);
  for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);
  return groups;
}

}  // namespace

FoldPlan stratified_kfold(std::span<const std::size_t> labels, std::size_t k,
                          std::uint64_t seed) {
  if (k < 2) throw InvalidConfigError("k-fold needs k >= 2");
  auto groups = group_by_class(labels);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (!groups[c].empty() && groups[c].size() < k) {
      throw StratificationError("class " + std::to_string(c) + " has " +
                                std::to_string(groups[c].size()) +
                                " members, fewer than k = " + std::to_string(k));
    }
  }
  FoldPlan plan{k, true, seed, std::vector<std::vector<std::size_t>>(k)};
  std::mt19937_64 rng(seed);
  std::size_t next = 0;
  for (auto& g : groups) {
    std::shuffle(g.begin(), g.end(), rng);
    for (std::size_t idx : g) {
      plan.folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

TrainTestSplit split_train_test(std::span<const std::size_t> labels,
                                double train_ratio, bool stratified,
                                std::uint64_t seed) {
  if (labels.empty()) throw InvalidInputError("cannot split an empty dataset");
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
    throw InvalidConfigError("train ratio must lie strictly between 0 and 1");
  }
  const std::size_t n = labels.size();
  const auto n_train = static_cast<std::size_t>(std::llround(train_ratio * n));
  std::mt19937_64 rng(seed);
  TrainTestSplit out;
  if (!stratified) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    out.train.assign(idx.begin(), idx.begin() + n_train);
    out.test.assign(idx.begin() + n_train, idx.end());
  } else {
    auto groups = group_by_class(labels);
    std::vector<std::size_t> take(groups.size());
    std::vector<std::pair<double, std::size_t>> remainder;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const double exact = train_ratio * static_cast<double>(groups[c].size());
      take[c] = static_cast<std::size_t>(std::floor(exact));
      assigned += take[c];
      remainder.push_back({exact - std::floor(exact), c});
    }
    std::stable_sort(remainder.begin(), remainder.end(),
                     [](auto& a, auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; assigned < n_train && i < remainder.size(); ++i) {
      const std::size_t c = remainder[i].second;
      if (take[c] < groups[c].size()) {
        ++take[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < groups.size(); ++c) {
      auto& g = groups[c];
      std::shuffle(g.begin(), g.end(), rng);
      out.train.insert(out.train.end(), g.begin(), g.begin() + take[c]);
      out.test.insert(out.test.end(), g.begin() + take[c], g.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // Continued fraction converges fastest for x < (a+1)/(a+b+2); use the
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
  if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - incomplete_beta(b, a, 1.0 - x);
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double f = d;
  for (int m = 1; m <= 500; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    f *= d * c;
    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    f *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_front) * f / a;
}

double student_t_two_sided(double t, double df) {
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInputError("paired t-test needs equal-length score vectors");
  }
  const std::size_t n = a.size();
  if (n < 2) throw InvalidInputError("paired t-test needs at least two pairs");
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  TTestResult r;
  r.df = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) return r;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided(r.t, static_cast<double>(r.df));
  return r;
}

void write_metrics_tsv(std::ostream& out, const std::string& method,
                       const MetricsReport& report,
                       std::span<const std::string> class_names) {
  char buf[128];
  auto row = [&](const std::string& cls, double p, double r, double f) {
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.6f\t%.6f\n", p, r, f);
    out << method << '\t' << cls << buf;
  };
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const std::string name =
        c < class_names.size() ? class_names[c] : std::to_string(c);
    const auto& m = report.per_class[c];
    row(name, m.precision, m.recall, m.f1);
  }
  row("macro", report.macro_precision, report.macro_recall, report.macro_f1);
}

}  // namespace oovc::eval
