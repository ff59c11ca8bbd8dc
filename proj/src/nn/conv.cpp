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

#include <limits>
#include <string>

#include "oovc/error.hpp"
#include "oovc/kernels.hpp"
#include "oovc/nn.hpp"

namespace oovc::nn {

template <typename T>
Vector<T> conv_maxpool_forward(const LayerParams<T>& params,
                               const Matrix<T>& inputs, ConvTape<T>* tape) {
  if (params.kind != LayerKind::kConvMaxPool) {
    throw InvalidInputError("conv_maxpool_forward called with a non-conv layer");
  }
  if (inputs.cols != params.shape.input_dim) {
    throw InvalidInputError("conv input width does not match the layer");
  }
  const auto& widths = params.shape.filter_widths;
  const std::size_t filters = params.shape.hidden_dim;
  const std::size_t steps = inputs.rows;
  bool any = false;
  for (std::size_t w : widths) any = any || w <= steps;
  if (!any) {
    throw InvalidInputError("every filter is wider than the " +
                            std::to_string(steps) + "-step input");
  }
  Vector<T> out(filters * widths.size(), T(0));
  if (tape) {
    tape->input = inputs;
    tape->argmax.assign(widths.size(), std::vector<std::size_t>(filters, 0));
    tape->active.assign(widths.size(), false);
  }
  Vector<T> resp(filters);
  for (std::size_t wi = 0; wi < widths.size(); ++wi) {
    const std::size_t width = widths[wi];
    if (width > steps) continue;
    const Matrix<T>& wm = params.weights[2 * wi];
    const Matrix<T>& bm = params.weights[2 * wi + 1];
    T* best = out.data() + wi * filters;
    std::vector<std::size_t> arg(filters, 0);
    for (std::size_t f = 0; f < filters; ++f) {
      best[f] = -std::numeric_limits<T>::infinity();
    }
    for (std::size_t p = 0; p + width <= steps; ++p) {
      std::copy(bm.data.begin(), bm.data.end(), resp.begin());
      kernels::gemv(wm.data.data(), wm.rows, wm.cols, inputs.row_ptr(p),
                    resp.data());
      for (std::size_t f = 0; f < filters; ++f) {
        if (resp[f] > best[f]) {  // strict: ties keep the earliest position
          best[f] = resp[f];
          arg[f] = p;
        }
      }
    }
    if (tape) {
      tape->argmax[wi] = std::move(arg);
      tape->active[wi] = true;
    }
  }
  return out;
}

template <typename T>
void conv_maxpool_backward(const LayerParams<T>& params,
                           const ConvTape<T>& tape, std::span<const T> d_output,
                           LayerParams<T>& grads, Matrix<T>* d_inputs) {
  const auto& widths = params.shape.filter_widths;
  const std::size_t filters = params.shape.hidden_dim;
  const std::size_t in = params.shape.input_dim;
  if (d_output.size() != filters * widths.size()) {
    throw InvalidInputError("conv backward: output gradient has wrong length");
  }
  if (d_inputs && !d_inputs->same_shape(tape.input)) {
    *d_inputs = Matrix<T>(tape.input.rows, tape.input.cols);
  }
  for (std::size_t wi = 0; wi < widths.size(); ++wi) {
    if (!tape.active[wi]) continue;
    const std::size_t span = widths[wi] * in;
    const Matrix<T>& wm = params.weights[2 * wi];
    Matrix<T>& dw = grads.weights[2 * wi];
    Matrix<T>& db = grads.weights[2 * wi + 1];
    for (std::size_t f = 0; f < filters; ++f) {
      const T g = d_output[wi * filters + f];
      if (g == T(0)) continue;
      const std::size_t p = tape.argmax[wi][f];
      const T* window = tape.input.row_ptr(p);
      kernels::axpy<T>(g, {window, span}, dw.row(f));
      db.data[f] += g;
      if (d_inputs) {
        kernels::axpy<T>(g, wm.row(f), {d_inputs->row_ptr(p), span});
      }
    }
  }
}

template Vector<float> conv_maxpool_forward<float>(const LayerParams<float>&,
                                                   const Matrix<float>&,
                                                   ConvTape<float>*);
template Vector<double> conv_maxpool_forward<double>(
    const LayerParams<double>&, const Matrix<double>&, ConvTape<double>*);
template void conv_maxpool_backward<float>(const LayerParams<float>&,
                                           const ConvTape<float>&,
                                           std::span<const float>,
                                           LayerParams<float>&,
                                           Matrix<float>*);
template void conv_maxpool_backward<double>(const LayerParams<double>&,
                                            const ConvTape<double>&,
                                            std::span<const double>,
                                            LayerParams<double>&,
                                            Matrix<double>*);

}  // namespace oovc::nn
