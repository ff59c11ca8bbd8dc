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

#include <cmath>
#include <string>

#include "oovc/error.hpp"
#include "oovc/nn.hpp"

namespace oovc::nn {

template <typename T>
double cross_entropy(std::span<const T> probs, std::size_t target) {
  if (target >= probs.size()) {
    throw InvalidInputError("cross-entropy target class out of range");
  }
  double sum = 0.0;
  for (T p : probs) sum += static_cast<double>(p);
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidInputError("cross-entropy needs a normalized probability "
                            "vector, got sum " + std::to_string(sum));
  }
  const double p = static_cast<double>(probs[target]);
  return -std::log(std::max(p, 1e-300));
}

template <typename T>
double mse(std::span<const T> prediction, std::span<const T> target) {
  if (prediction.size() != target.size() || prediction.empty()) {
    throw InvalidInputError("mse needs two nonempty vectors of equal length");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = static_cast<double>(prediction[i]) - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(prediction.size());
}

template <typename T>
void mse_gradient(std::span<const T> prediction, std::span<const T> target,
                  std::span<T> grad, T scale) {
  const T k = scale * T(2) / static_cast<T>(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    grad[i] += k * (prediction[i] - target[i]);
  }
}

template <typename T>
Vector<T> softmax_cross_entropy_gradient(std::span<const T> probs,
                                         std::size_t target) {
  Vector<T> g(probs.begin(), probs.end());
  g[target] -= T(1);
  return g;
}

template <typename T>
Vector<T> dropout_apply(std::span<const T> input, double rate, bool training,
                        Rng& rng, std::vector<T>* mask) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw InvalidConfigError("dropout rate must lie in [0, 1), got " +
                             std::to_string(rate));
  }
  Vector<T> out(input.begin(), input.end());
  if (mask) mask->assign(input.size(), T(1));
  if (!training || rate == 0.0) return out;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T m = u(rng) < rate ? T(0) : keep_scale;
    out[i] *= m;
    if (mask) (*mask)[i] = m;
  }
  return out;
}

template <typename T>
Vector<T> dropout_apply(std::span<const T> input, double rate, bool training,
                        std::uint64_t seed) {
  Rng rng(seed);
  return dropout_apply<T>(input, rate, training, rng, nullptr);
}

template <typename T>
Vector<T> l2_normalize(std::span<const T> v) {
  double sq = 0.0;
  for (T x : v) sq += static_cast<double>(x) * x;
  Vector<T> out(v.begin(), v.end());
  if (sq == 0.0) return out;
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : out) x = static_cast<T>(x * inv);
  return out;
}

template <typename T>
AdamState<T> make_adam_state(const AdamConfig& config,
                             std::span<const Matrix<T>* const> params) {
  AdamState<T> s;
  s.config = config;
  for (const Matrix<T>* p : params) {
    s.m.emplace_back(p->rows, p->cols);
    s.v.emplace_back(p->rows, p->cols);
  }
  return s;
}

namespace {

template <typename T>
inline void adam_update(T* p, T* m, T* v, const T* g, std::size_t n, double b1,
                        double b2, double step_size, double eps_hat) {
  for (std::size_t i = 0; i < n; ++i) {
    const double gi = g[i];
    const double mi = b1 * m[i] + (1.0 - b1) * gi;
    const double vi = b2 * v[i] + (1.0 - b2) * gi * gi;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    p[i] = static_cast<T>(p[i] - step_size * mi / (std::sqrt(vi) + eps_hat));
  }
}

}  // namespace

template <typename T>
void adam_step(AdamState<T>& state, std::span<Matrix<T>* const> params,
               std::span<const Matrix<T>* const> grads,
               std::span<const RowSubset> sparse) {
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw InvalidInputError("adam: parameter/gradient/state count mismatch");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (!params[k]->same_shape(*grads[k]) || !params[k]->same_shape(state.m[k])) {
      throw InvalidInputError("adam: shape mismatch for parameter " +
                              std::to_string(k));
    }
    for (T g : grads[k]->data) {
      if (!std::isfinite(static_cast<double>(g))) {
        throw TrainingError("non-finite gradient; training diverged");
      }
    }
  }
  state.step += 1;
  const auto& c = state.config;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  // Folded bias correction: lr * mhat / (sqrt(vhat) + eps).
  const double step_size = c.learning_rate * std::sqrt(bc2) / bc1;
  const double eps_hat = c.epsilon * std::sqrt(bc2);

  std::vector<const RowSubset*> subset_of(params.size(), nullptr);
  for (const auto& s : sparse) {
    if (s.param_index >= params.size()) {
      throw InvalidInputError("adam: row subset names a missing parameter");
    }
    subset_of[s.param_index] = &s;
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix<T>& p = *params[k];
    const Matrix<T>& g = *grads[k];
    Matrix<T>& m = state.m[k];
    Matrix<T>& v = state.v[k];
    if (const RowSubset* s = subset_of[k]) {
      for (std::size_t r : s->rows) {
        adam_update(p.row_ptr(r), m.row_ptr(r), v.row_ptr(r), g.row_ptr(r),
                    p.cols, c.beta1, c.beta2, step_size, eps_hat);
      }
    } else {
      adam_update(p.data.data(), m.data.data(), v.data.data(), g.data.data(),
                  p.data.size(), c.beta1, c.beta2, step_size, eps_hat);
    }
  }
}

#define OOVC_INSTANTIATE(T)                                                    \
  template double cross_entropy<T>(std::span<const T>, std::size_t);           \
  template double mse<T>(std::span<const T>, std::span<const T>);              \
  template void mse_gradient<T>(std::span<const T>, std::span<const T>,        \
                                std::span<T>, T);                              \
  template Vector<T> softmax_cross_entropy_gradient<T>(std::span<const T>,     \
                                                       std::size_t);           \
  template Vector<T> dropout_apply<T>(std::span<const T>, double, bool, Rng&,  \
                                      std::vector<T>*);                        \
  template Vector<T> dropout_apply<T>(std::span<const T>, double, bool,        \
                                      std::uint64_t);                          \
  template Vector<T> l2_normalize<T>(std::span<const T>);                      \
  template AdamState<T> make_adam_state<T>(const AdamConfig&,                  \
                                           std::span<const Matrix<T>* const>); \
  template void adam_step<T>(AdamState<T>&, std::span<Matrix<T>* const>,       \
                             std::span<const Matrix<T>* const>,                \
                             std::span<const RowSubset>);

OOVC_INSTANTIATE(float)
OOVC_INSTANTIATE(double)
#undef OOVC_INSTANTIATE

}  // namespace oovc::nn
