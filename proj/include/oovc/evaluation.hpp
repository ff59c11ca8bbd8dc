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

// Classification metrics, data splitting and paired significance testing.

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace oovc::eval {

// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
  std::size_t classes = 0;
  std::vector<std::uint64_t> counts;

  std::uint64_t at(std::size_t gold, std::size_t predicted) const {
    return counts[gold * classes + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t gold_count(std::size_t cls) const;
  std::uint64_t predicted_count(std::size_t cls) const;
};

ConfusionMatrix confusion_matrix(std::span<const std::size_t> gold,
                                 std::span<const std::size_t> predicted,
                                 std::size_t classes);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> fold_scores;  // macro F1 per fold, when applicable
  ConfusionMatrix confusion;
};

// Per-class P/R/F1 with 0 for any zero denominator; macro values are plain
// means over all classes. Throws InvalidInputError for fewer than two
// classes, mismatched lengths or out-of-range labels.
MetricsReport compute_metrics(std::span<const std::size_t> gold,
                              std::span<const std::size_t> predicted,
                              std::size_t classes);

// Averages per-class and macro values over several reports and records the
// macro F1 of each in fold_scores.
MetricsReport average_reports(std::span<const MetricsReport> reports);

struct FoldPlan {
  std::size_t k = 0;
  bool stratified = true;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;  // sorted indices per fold

  std::vector<std::size_t> test_indices(std::size_t fold) const {
    return folds.at(fold);
  }
  std::vector<std::size_t> train_indices(std::size_t fold) const;
};

// Every class is spread over the folds so per-class fold counts differ by at
// most one. Throws StratificationError if a class has fewer than k members.
FoldPlan stratified_kfold(std::span<const std::size_t> labels, std::size_t k,
                          std::uint64_t seed);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Train size is round(ratio * n); stratified splits keep each class within
// one sample of its exact share.
TrainTestSplit split_train_test(std::span<const std::size_t> labels,
                                double train_ratio, bool stratified,
                                std::uint64_t seed);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t df = 0;
};

// Paired two-sided t-test on a - b with n - 1 degrees of freedom. All-zero
// differences give t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);

// Two-sided tail probability of Student's t with `df` degrees of freedom.
double student_t_two_sided(double t, double df);

// Rows "method<TAB>class<TAB>precision<TAB>recall<TAB>f1", one per class and
// a final "macro" row.
void write_metrics_tsv(std::ostream& out, const std::string& method,
                       const MetricsReport& report,
                       std::span<const std::string> class_names);

}  // namespace oovc::eval
