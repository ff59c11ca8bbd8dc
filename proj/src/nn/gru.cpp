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
#include "oovc/kernels.hpp"
#include "oovc/nn.hpp"

namespace oovc::nn {
namespace {

template <typename T>
inline T sigmoid(T x) {
  return T(1) / (T(1) + std::exp(-x));
}

}  // namespace

template <typename T>
GruOutput<T> gru_forward(const LayerParams<T>& params, const Matrix<T>& inputs,
                         std::span<const T> h0, GruTape<T>* tape) {
  if (params.kind != LayerKind::kGru) {
    throw InvalidInputError("gru_forward called with a non-GRU layer");
  }
  if (inputs.rows == 0) {
    throw InvalidInputError("gru_forward needs a nonempty input sequence");
  }
  const std::size_t hd = params.shape.hidden_dim;
  if (inputs.cols != params.shape.input_dim) {
    throw InvalidInputError("gru input width " + std::to_string(inputs.cols) +
                            " does not match layer input " +
                            std::to_string(params.shape.input_dim));
  }
  if (!h0.empty() && h0.size() != hd) {
    throw InvalidInputError("gru initial state has the wrong width");
  }
  const std::size_t steps = inputs.rows;
  GruOutput<T> out;
  if (tape) tape->layers.assign(params.shape.layers, {});

  const Matrix<T>* layer_in = &inputs;
  Vector<T> a(3 * hd), rh(hd);
  for (std::size_t l = 0; l < params.shape.layers; ++l) {
    const Matrix<T>& w = params.weights[3 * l];
    const Matrix<T>& u = params.weights[3 * l + 1];
    const Matrix<T>& b = params.weights[3 * l + 2];
    Matrix<T> h(steps + 1, hd);
    if (!h0.empty()) std::copy(h0.begin(), h0.end(), h.row_ptr(0));
    Matrix<T> z, r, cand, reset_h;
    if (tape) {
      z = Matrix<T>(steps, hd);
      r = Matrix<T>(steps, hd);
      cand = Matrix<T>(steps, hd);
      reset_h = Matrix<T>(steps, hd);
    }
    for (std::size_t t = 0; t < steps; ++t) {
      const T* x = layer_in->row_ptr(t);
      const T* hp = h.row_ptr(t);
      std::copy(b.data.begin(), b.data.end(), a.begin());
      kernels::gemv(w.data.data(), w.rows, w.cols, x, a.data());
      kernels::gemv(u.data.data(), 2 * hd, hd, hp, a.data());
      for (std::size_t j = 0; j < 2 * hd; ++j) a[j] = sigmoid(a[j]);
      for (std::size_t j = 0; j < hd; ++j) rh[j] = a[hd + j] * hp[j];
      kernels::gemv(u.row_ptr(2 * hd), hd, hd, rh.data(), a.data() + 2 * hd);
      T* hn = h.row_ptr(t + 1);
      for (std::size_t j = 0; j < hd; ++j) {
        const T c = std::tanh(a[2 * hd + j]);
        a[2 * hd + j] = c;
        hn[j] = (T(1) - a[j]) * hp[j] + a[j] * c;
      }
      if (tape) {
        std::copy_n(a.data(), hd, z.row_ptr(t));
        std::copy_n(a.data() + hd, hd, r.row_ptr(t));
        std::copy_n(a.data() + 2 * hd, hd, cand.row_ptr(t));
        std::copy_n(rh.data(), hd, reset_h.row_ptr(t));
      }
    }
    Matrix<T> states(steps, hd);
    std::copy(h.data.begin() + hd, h.data.end(), states.data.begin());
    if (tape) {
      auto& tl = tape->layers[l];
      tl.input = *layer_in;
      tl.z = std::move(z);
      tl.r = std::move(r);
      tl.cand = std::move(cand);
      tl.reset_h = std::move(reset_h);
      tl.h = std::move(h);
    }
    out.states.push_back(std::move(states));
    layer_in = &out.states.back();
  }
  return out;
}

template <typename T>
void gru_backward(const LayerParams<T>& params, const GruTape<T>& tape,
                  const Matrix<T>& d_top, LayerParams<T>& grads,
                  Matrix<T>* d_inputs) {
  const std::size_t hd = params.shape.hidden_dim;
  const std::size_t layers = params.shape.layers;
  if (tape.layers.size() != layers) {
    throw InvalidInputError("gru_backward: tape does not match the layer");
  }
  Matrix<T> d_states = d_top;
  Vector<T> dh(hd), dh_prev(hd), da(3 * hd), d_rh(hd);
  for (std::size_t li = layers; li-- > 0;) {
    const auto& tl = tape.layers[li];
    const std::size_t steps = tl.input.rows;
    const Matrix<T>& w = params.weights[3 * li];
    const Matrix<T>& u = params.weights[3 * li + 1];
    Matrix<T>& dw = grads.weights[3 * li];
    Matrix<T>& du = grads.weights[3 * li + 1];
    Matrix<T>& db = grads.weights[3 * li + 2];
    Matrix<T> d_in(steps, tl.input.cols);
    std::fill(dh_prev.begin(), dh_prev.end(), T(0));
    for (std::size_t t = steps; t-- > 0;) {
      const T* hp = tl.h.row_ptr(t);
      const T* z = tl.z.row_ptr(t);
      const T* r = tl.r.row_ptr(t);
      const T* c = tl.cand.row_ptr(t);
      const T* ds = d_states.row_ptr(t);
      for (std::size_t j = 0; j < hd; ++j) dh[j] = ds[j] + dh_prev[j];
      for (std::size_t j = 0; j < hd; ++j) {
        const T dz = dh[j] * (c[j] - hp[j]);
        da[j] = dz * z[j] * (T(1) - z[j]);
        da[2 * hd + j] = dh[j] * z[j] * (T(1) - c[j] * c[j]);
        dh_prev[j] = dh[j] * (T(1) - z[j]);
      }
      std::fill(d_rh.begin(), d_rh.end(), T(0));
      kernels::gemv_t(u.row_ptr(2 * hd), hd, hd, da.data() + 2 * hd,
                      d_rh.data());
      for (std::size_t j = 0; j < hd; ++j) {
        const T dr = d_rh[j] * hp[j];
        da[hd + j] = dr * r[j] * (T(1) - r[j]);
        dh_prev[j] += d_rh[j] * r[j];
      }
      kernels::ger(T(1), da.data(), 3 * hd, tl.input.row_ptr(t), w.cols,
                   dw.data.data());
      kernels::ger(T(1), da.data(), 2 * hd, hp, hd, du.data.data());
      kernels::ger(T(1), da.data() + 2 * hd, hd, tl.reset_h.row_ptr(t), hd,
                   du.row_ptr(2 * hd));
      for (std::size_t j = 0; j < 3 * hd; ++j) db.data[j] += da[j];
      kernels::gemv_t(u.data.data(), 2 * hd, hd, da.data(), dh_prev.data());
      kernels::gemv_t(w.data.data(), 3 * hd, w.cols, da.data(),
                      d_in.row_ptr(t));
    }
    d_states = std::move(d_in);
  }
  if (d_inputs) {
    if (d_inputs->same_shape(d_states)) {
      for (std::size_t i = 0; i < d_states.data.size(); ++i) {
        d_inputs->data[i] += d_states.data[i];
      }
    } else {
      *d_inputs = std::move(d_states);
    }
  }
}

template GruOutput<float> gru_forward<float>(const LayerParams<float>&,
                                             const Matrix<float>&,
                                             std::span<const float>,
                                             GruTape<float>*);
template GruOutput<double> gru_forward<double>(const LayerParams<double>&,
                                               const Matrix<double>&,
                                               std::span<const double>,
                                               GruTape<double>*);
template void gru_backward<float>(const LayerParams<float>&,
                                  const GruTape<float>&, const Matrix<float>&,
                                  LayerParams<float>&, Matrix<float>*);
template void gru_backward<double>(const LayerParams<double>&,
                                   const GruTape<double>&,
                                   const Matrix<double>&, LayerParams<double>&,
                                   Matrix<double>*);

}  // namespace oovc::nn
