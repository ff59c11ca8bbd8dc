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
#include <cmath>

#include "oovc/error.hpp"
#include "oovc/kernels.hpp"
#include "oovc/nn.hpp"

namespace oovc::nn {

template <typename T>
Vector<T> softmax(std::span<const T> logits) {
  Vector<T> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  std::vector<double> e(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(static_cast<double>(logits[i]) - mx);
    sum += e[i];
  }
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = static_cast<T>(e[i] / sum);
  }
  return out;
}

template <typename T>
Vector<T> dense_forward(const LayerParams<T>& params, std::span<const T> input,
                        Activation activation) {
  const auto& w = params.weights[0];
  const auto& b = params.weights[1];
  if (params.kind != LayerKind::kDense || input.size() != w.cols) {
    throw InvalidInputError("dense input has " + std::to_string(input.size()) +
                            " entries, layer expects " +
                            std::to_string(w.cols));
  }
  Vector<T> z(b.data.begin(), b.data.end());
  kernels::gemv(w.data.data(), w.rows, w.cols, input.data(), z.data());
  switch (activation) {
    case Activation::kIdentity:
      return z;
    case Activation::kTanh:
      for (auto& v : z) v = std::tanh(v);
      return z;
    case Activation::kSoftmax:
      return softmax<T>(z);
  }
  return z;
}

template <typename T>
void dense_backward(const LayerParams<T>& params, std::span<const T> input,
                    std::span<const T> output, Activation activation,
                    std::span<const T> d_output, LayerParams<T>& grads,
                    std::span<T> d_input) {
  const auto& w = params.weights[0];
  if (d_output.size() != w.rows || output.size() != w.rows ||
      input.size() != w.cols) {
    throw InvalidInputError("dense backward shape mismatch");
  }
  Vector<T> dz(d_output.begin(), d_output.end());
  switch (activation) {
    case Activation::kIdentity:
      break;
    case Activation::kTanh:
      for (std::size_t i = 0; i < dz.size(); ++i) {
        dz[i] *= T(1) - output[i] * output[i];
      }
      break;
    case Activation::kSoftmax: {
      T s = 0;
      for (std::size_t i = 0; i < dz.size(); ++i) s += dz[i] * output[i];
      for (std::size_t i = 0; i < dz.size(); ++i) {
        dz[i] = output[i] * (dz[i] - s);
      }
      break;
    }
  }
  kernels::ger(T(1), dz.data(), w.rows, input.data(), w.cols,
               grads.weights[0].data.data());
  auto& db = grads.weights[1].data;
  for (std::size_t i = 0; i < dz.size(); ++i) db[i] += dz[i];
  if (!d_input.empty()) {
    kernels::gemv_t(w.data.data(), w.rows, w.cols, dz.data(), d_input.data());
  }
}

template <typename T>
Matrix<T> embedding_forward(const LayerParams<T>& params,
                            std::span<const std::size_t> ids) {
  const auto& table = params.weights[0];
  Matrix<T> out(ids.size(), table.cols);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] >= table.rows) {
      throw InvalidInputError("embedding id " + std::to_string(ids[t]) +
                              " out of range");
    }
    std::copy_n(table.row_ptr(ids[t]), table.cols, out.row_ptr(t));
  }
  return out;
}

template <typename T>
void embedding_backward(std::span<const std::size_t> ids,
                        const Matrix<T>& d_output, LayerParams<T>& grads) {
  auto& g = grads.weights[0];
  for (std::size_t t = 0; t < ids.size(); ++t) {
    kernels::axpy<T>(T(1), d_output.row(t), g.row(ids[t]));
  }
}

#define OOVC_INSTANTIATE(T)                                                   \
  template Vector<T> softmax<T>(std::span<const T>);                          \
  template Vector<T> dense_forward<T>(const LayerParams<T>&,                  \
                                      std::span<const T>, Activation);        \
  template void dense_backward<T>(const LayerParams<T>&, std::span<const T>,  \
                                  std::span<const T>, Activation,             \
                                  std::span<const T>, LayerParams<T>&,        \
                                  std::span<T>);                              \
  template Matrix<T> embedding_forward<T>(const LayerParams<T>&,              \
                                          std::span<const std::size_t>);      \
  template void embedding_backward<T>(std::span<const std::size_t>,           \
                                      const Matrix<T>&, LayerParams<T>&);

OOVC_INSTANTIATE(float)
OOVC_INSTANTIATE(double)
#undef OOVC_INSTANTIATE

}  // namespace oovc::nn
