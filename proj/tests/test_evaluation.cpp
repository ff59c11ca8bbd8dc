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

#include <boost/math/distributions/students_t.hpp>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "oovc/error.hpp"
#include "oovc/evaluation.hpp"

using namespace oovc;
using namespace oovc::eval;

namespace {

// Brute force: precision of class c = (#i with gold=c and pred=c) /
// (#i with pred=c), computed by direct scans.
std::vector<double> brute_precision(const std::vector<std::size_t>& g,
                                    const std::vector<std::size_t>& p,
                                    std::size_t classes) {
  std::vector<double> out;
  for (std::size_t c = 0; c < classes; ++c) {
    double tp = 0, pc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (p[i] == c) {
        pc += 1;
        if (g[i] == c) tp += 1;
      }
    }
    out.push_back(pc == 0 ? 0.0 : tp / pc);
  }
  return out;
}

std::vector<std::size_t> labels_from_confusion(
    const std::vector<std::vector<int>>& rows, bool gold) {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < rows.size(); ++g) {
    for (std::size_t p = 0; p < rows[g].size(); ++p) {
      for (int k = 0; k < rows[g][p]; ++k) out.push_back(gold ? g : p);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("compute_metrics examples") {
  std::vector<std::size_t> y{0, 1, 2, 1, 0};
  auto perfect = compute_metrics(y, y, 3);
  CHECK(perfect.macro_precision == 1.0);
  CHECK(perfect.macro_recall == 1.0);
  CHECK(perfect.macro_f1 == 1.0);

  // Per-class precision [1.0, 0.5].
  std::vector<std::size_t> g{0, 1, 0};
  std::vector<std::size_t> p{0, 1, 1};
  auto r = compute_metrics(g, p, 2);
  CHECK(r.per_class[0].precision == 1.0);
  CHECK(r.per_class[1].precision == 0.5);
  CHECK(r.macro_precision == 0.75);

  std::vector<std::vector<int>> rows{{2, 1, 0}, {0, 3, 0}, {1, 0, 3}};
  auto gg = labels_from_confusion(rows, true);
  auto pp = labels_from_confusion(rows, false);
  auto r3 = compute_metrics(gg, pp, 3);
  CHECK(r3.per_class[0].precision == doctest::Approx(2.0 / 3.0));
  CHECK(r3.per_class[1].precision == doctest::Approx(0.75));
  CHECK(r3.per_class[2].precision == doctest::Approx(1.0));
  CHECK(r3.macro_precision == doctest::Approx(0.8055555556));

  std::vector<std::size_t> bad{0, 3};
  std::vector<std::size_t> ok{0, 1};
  CHECK_THROWS_AS(compute_metrics(ok, bad, 3), InvalidInputError);
  CHECK_THROWS_AS(compute_metrics(ok, ok, 1), InvalidInputError);
}

TEST_CASE("zero denominators count as zero") {
  std::vector<std::size_t> g{0, 0, 0};
  std::vector<std::size_t> p{0, 0, 0};
  auto r = compute_metrics(g, p, 2);
  CHECK(r.per_class[1].precision == 0.0);
  CHECK(r.per_class[1].recall == 0.0);
  CHECK(r.per_class[1].f1 == 0.0);
  CHECK(r.macro_f1 == 0.5);
}

TEST_CASE("metrics match the brute-force oracle and are relabel-invariant") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> cls(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::size_t> g(40), p(40);
    for (auto& x : g) x = cls(rng);
    for (auto& x : p) x = cls(rng);
    auto r = compute_metrics(g, p, 3);
    auto bp = brute_precision(g, p, 3);
    for (std::size_t c = 0; c < 3; ++c) CHECK(r.per_class[c].precision == bp[c]);
    for (double v : {r.macro_precision, r.macro_recall, r.macro_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(r.confusion.gold_count(c) ==
            static_cast<std::uint64_t>(std::count(g.begin(), g.end(), c)));
    }
    std::vector<std::size_t> perm{2, 0, 1};
    auto g2 = g, p2 = p;
    for (auto& x : g2) x = perm[x];
    for (auto& x : p2) x = perm[x];
    CHECK(compute_metrics(g2, p2, 3).macro_f1 == doctest::Approx(r.macro_f1));
  }
}

TEST_CASE("stratified k-fold") {
  std::vector<std::size_t> labels(100, 1);
  for (std::size_t i = 0; i < 30; ++i) labels[i * 3] = 0;
  auto plan = stratified_kfold(labels, 10, 5);
  std::set<std::size_t> all;
  std::size_t total = 0;
  for (const auto& f : plan.folds) {
    std::size_t zeros = 0;
    for (std::size_t i : f) zeros += labels[i] == 0;
    CHECK(zeros == 3);
    CHECK(f.size() - zeros == 7);
    all.insert(f.begin(), f.end());
    total += f.size();
  }
  CHECK(all.size() == 100);
  CHECK(total == 100);
  CHECK(stratified_kfold(labels, 10, 5).folds == plan.folds);
  CHECK(plan.train_indices(0).size() == 90);

  std::vector<std::size_t> small(20, 0);
  for (std::size_t i = 0; i < 5; ++i) small[i] = 1;
  CHECK_THROWS_AS(stratified_kfold(small, 10, 1), StratificationError);
}

TEST_CASE("stratified fold counts differ by at most one per class") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::size_t> labels(60 + trial);
    for (auto& l : labels) l = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    std::size_t min_class = labels.size();
    for (std::size_t c = 0; c < 4; ++c) {
      min_class = std::min<std::size_t>(
          min_class, std::count(labels.begin(), labels.end(), c));
    }
    const std::size_t k = std::min<std::size_t>(5, min_class);
    if (k < 2) continue;
    auto plan = stratified_kfold(labels, k, trial);
    for (std::size_t c = 0; c < 4; ++c) {
      std::size_t lo = labels.size(), hi = 0;
      for (const auto& f : plan.folds) {
        std::size_t n = 0;
        for (std::size_t i : f) n += labels[i] == c;
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      CHECK(hi - lo <= 1);
    }
  }
}

TEST_CASE("train/test split") {
  std::vector<std::size_t> ten{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  auto s = split_train_test(ten, 0.6, true, 1);
  CHECK(s.train.size() == 6);
  CHECK(s.test.size() == 4);
  std::size_t zeros = 0;
  for (std::size_t i : s.train) zeros += ten[i] == 0;
  CHECK(zeros == 3);

  std::vector<std::size_t> labels(50);
  for (std::size_t i = 0; i < 50; ++i) labels[i] = i % 7 == 0 ? 1 : 0;
  auto a = split_train_test(labels, 0.6, true, 3);
  auto b = split_train_test(labels, 0.6, true, 3);
  auto c = split_train_test(labels, 0.6, true, 4);
  CHECK(a.train == b.train);
  CHECK(a.train != c.train);
  CHECK(a.train.size() == 30);
  const double ones = std::count(labels.begin(), labels.end(), 1);
  std::size_t train_ones = 0;
  for (std::size_t i : a.train) train_ones += labels[i];
  CHECK(std::abs(train_ones - 0.6 * ones) <= 1.0);

  CHECK_THROWS_AS(split_train_test({}, 0.6, true, 1), InvalidInputError);
  auto u = split_train_test(labels, 0.6, false, 2);
  CHECK(u.train.size() == 30);
}

TEST_CASE("paired t-test") {
  std::vector<double> a{0.7, 0.8, 0.75};
  auto same = paired_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  std::vector<double> d(10), zero(10, 0.0);
  for (int i = 0; i < 10; ++i) d[i] = i + 1;
  auto r = paired_t_test(d, zero);
  CHECK(r.t == doctest::Approx(5.744).epsilon(0.001 / 5.744));
  CHECK(r.df == 9);
  // Reference value 2.782e-4 (t-distribution, 9 df).
  CHECK(r.p == doctest::Approx(2.7819601104818546e-4).epsilon(1e-9));

  auto swapped = paired_t_test(zero, d);
  CHECK(swapped.t == doctest::Approx(-r.t));
  CHECK(swapped.p == doctest::Approx(r.p));

  std::vector<double> one{1.0};
  CHECK_THROWS_AS(paired_t_test(one, one), InvalidInputError);
}

TEST_CASE("t-distribution tail matches an independent implementation") {
  for (double df : {1.0, 2.0, 4.0, 9.0, 29.0, 120.0}) {
    boost::math::students_t dist(df);
    double prev = 1.0;
    for (double t = 0.0; t <= 12.0; t += 0.37) {
      const double expect = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
      const double got = student_t_two_sided(t, df);
      CHECK(std::abs(got - expect) <= 1e-10 * std::max(1.0, expect / 1e-10));
      CHECK(got > 0.0);
      CHECK(got <= 1.0);
      CHECK(got <= prev);
      prev = got;
    }
  }
  // Published two-sided 5% critical value for 9 df.
  CHECK(student_t_two_sided(2.262157, 9) == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("metrics tsv") {
  std::vector<std::size_t> g{0, 1}, p{0, 1};
  std::ostringstream os;
  std::vector<std::string> names{"none", "abusive"};
  write_metrics_tsv(os, "hs", compute_metrics(g, p, 2), names);
  CHECK(os.str() ==
        "hs\tnone\t1.000000\t1.000000\t1.000000\n"
        "hs\tabusive\t1.000000\t1.000000\t1.000000\n"
        "hs\tmacro\t1.000000\t1.000000\t1.000000\n");
}
