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

// Central finite-difference oracle shared by the gradient tests. It never
// touches the backward code path: it perturbs one weight, reruns the
// forward function, and compares.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "oovc/nn.hpp"

namespace oovc::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

inline double rel_error(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

// `loss` evaluates the scalar objective for the current weights.
inline GradCheckResult check_layer(
    nn::LayerParams<double>& params, const nn::LayerParams<double>& analytic,
    const std::function<double()>& loss, double step = 1e-5,
    std::size_t max_per_matrix = 40, std::uint64_t seed = 7) {
  GradCheckResult res;
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < params.weights.size(); ++k) {
    auto& w = params.weights[k];
    std::vector<std::size_t> idx(w.data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(std::min(idx.size(), max_per_matrix));
    for (std::size_t i : idx) {
      const double orig = w.data[i];
      w.data[i] = orig + step;
      const double up = loss();
      w.data[i] = orig - step;
      const double down = loss();
      w.data[i] = orig;
      const double numeric = (up - down) / (2 * step);
      res.max_rel_error = std::max(
          res.max_rel_error, rel_error(analytic.weights[k].data[i], numeric));
      ++res.checked;
    }
  }
  return res;
}

inline GradCheckResult check_matrix(Matrix<double>& m,
                                    const Matrix<double>& analytic,
                                    const std::function<double()>& loss,
                                    double step = 1e-5) {
  GradCheckResult res;
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    const double orig = m.data[i];
    m.data[i] = orig + step;
    const double up = loss();
    m.data[i] = orig - step;
    const double down = loss();
    m.data[i] = orig;
    res.max_rel_error = std::max(
        res.max_rel_error, rel_error(analytic.data[i], (up - down) / (2 * step)));
    ++res.checked;
  }
  return res;
}

inline Matrix<double> random_matrix(std::size_t r, std::size_t c,
                                    std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> d(-scale, scale);
  Matrix<double> m(r, c);
  for (auto& x : m.data) x = d(rng);
  return m;
}

inline double weighted_sum(const Matrix<double>& m, const Matrix<double>& c) {
  double s = 0;
  for (std::size_t i = 0; i < m.data.size(); ++i) s += m.data[i] * c.data[i];
  return s;
}

}  // namespace oovc::testing
