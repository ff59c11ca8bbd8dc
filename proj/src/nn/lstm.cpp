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

// Runs one direction. States are stored at their original positions; for
// the reverse direction "previous" means position t+1.
template <typename T>
void run_direction(const Matrix<T>& w, const Matrix<T>& u, const Matrix<T>& b,
                   const Matrix<T>& x, bool reverse, LstmDirTape<T>& out) {
  const std::size_t hd = u.cols;
  const std::size_t steps = x.rows;
  out.gates = Matrix<T>(steps, 4 * hd);
  out.c = Matrix<T>(steps, hd);
  out.tanh_c = Matrix<T>(steps, hd);
  out.h = Matrix<T>(steps, hd);
  Vector<T> zero(hd, T(0));
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    const T* hp = k == 0 ? zero.data() : out.h.row_ptr(reverse ? t + 1 : t - 1);
    const T* cp = k == 0 ? zero.data() : out.c.row_ptr(reverse ? t + 1 : t - 1);
    T* a = out.gates.row_ptr(t);
    std::copy(b.data.begin(), b.data.end(), a);
    kernels::gemv(w.data.data(), w.rows, w.cols, x.row_ptr(t), a);
    kernels::gemv(u.data.data(), u.rows, u.cols, hp, a);
    T* c = out.c.row_ptr(t);
    T* tc = out.tanh_c.row_ptr(t);
    T* h = out.h.row_ptr(t);
    for (std::size_t j = 0; j < hd; ++j) {
      const T ig = sigmoid(a[j]);
      const T fg = sigmoid(a[hd + j]);
      const T gg = std::tanh(a[2 * hd + j]);
      const T og = sigmoid(a[3 * hd + j]);
      a[j] = ig;
      a[hd + j] = fg;
      a[2 * hd + j] = gg;
      a[3 * hd + j] = og;
      c[j] = fg * cp[j] + ig * gg;
      tc[j] = std::tanh(c[j]);
      h[j] = og * tc[j];
    }
  }
}

template <typename T>
void backprop_direction(const Matrix<T>& w, const Matrix<T>& u,
                        const Matrix<T>& x, bool reverse,
                        const LstmDirTape<T>& tp, const Matrix<T>& d_h,
                        Matrix<T>& dw, Matrix<T>& du, Matrix<T>& db,
                        Matrix<T>& d_x) {
  const std::size_t hd = u.cols;
  const std::size_t steps = x.rows;
  Vector<T> dh(hd), dh_next(hd, T(0)), dc_next(hd, T(0)), da(4 * hd);
  Vector<T> zero(hd, T(0));
  for (std::size_t k = steps; k-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - k : k;
    const bool first = k == 0;
    const std::size_t prev = reverse ? t + 1 : t - 1;
    const T* hp = first ? zero.data() : tp.h.row_ptr(prev);
    const T* cp = first ? zero.data() : tp.c.row_ptr(prev);
    const T* g = tp.gates.row_ptr(t);
    const T* tc = tp.tanh_c.row_ptr(t);
    const T* dhs = d_h.row_ptr(t);
    for (std::size_t j = 0; j < hd; ++j) {
      dh[j] = dhs[j] + dh_next[j];
      const T ig = g[j], fg = g[hd + j], gg = g[2 * hd + j], og = g[3 * hd + j];
      const T dc = dc_next[j] + dh[j] * og * (T(1) - tc[j] * tc[j]);
      da[j] = dc * gg * ig * (T(1) - ig);
      da[hd + j] = dc * cp[j] * fg * (T(1) - fg);
      da[2 * hd + j] = dc * ig * (T(1) - gg * gg);
      da[3 * hd + j] = dh[j] * tc[j] * og * (T(1) - og);
      dc_next[j] = dc * fg;
    }
    kernels::ger(T(1), da.data(), 4 * hd, x.row_ptr(t), w.cols, dw.data.data());
    if (!first) kernels::ger(T(1), da.data(), 4 * hd, hp, hd, du.data.data());
    for (std::size_t j = 0; j < 4 * hd; ++j) db.data[j] += da[j];
    std::fill(dh_next.begin(), dh_next.end(), T(0));
    kernels::gemv_t(u.data.data(), u.rows, u.cols, da.data(), dh_next.data());
    kernels::gemv_t(w.data.data(), w.rows, w.cols, da.data(), d_x.row_ptr(t));
  }
}

}  // namespace

template <typename T>
BiLstmOutput<T> bilstm_forward(const LayerParams<T>& params,
                               const Matrix<T>& inputs, BiLstmTape<T>* tape) {
  if (params.kind != LayerKind::kBiLstm) {
    throw InvalidInputError("bilstm_forward called with a non-LSTM layer");
  }
  if (inputs.rows == 0) {
    throw InvalidInputError("bilstm_forward needs a nonempty input sequence");
  }
  if (inputs.cols != params.shape.input_dim) {
    throw InvalidInputError("bilstm input width " +
                            std::to_string(inputs.cols) +
                            " does not match layer input " +
                            std::to_string(params.shape.input_dim));
  }
  BiLstmTape<T> local;
  BiLstmTape<T>& tp = tape ? *tape : local;
  tp.layers.assign(params.shape.layers, {});
  for (std::size_t l = 0; l < params.shape.layers; ++l) {
    auto& tl = tp.layers[l];
    const Matrix<T>& fin = l == 0 ? inputs : tp.layers[l - 1].fwd.h;
    const Matrix<T>& bin = l == 0 ? inputs : tp.layers[l - 1].bwd.h;
    const std::size_t base = 6 * l;
    run_direction(params.weights[base], params.weights[base + 1],
                  params.weights[base + 2], fin, false, tl.fwd);
    run_direction(params.weights[base + 3], params.weights[base + 4],
                  params.weights[base + 5], bin, true, tl.bwd);
    if (tape) {
      tl.fwd_input = fin;
      tl.bwd_input = bin;
    }
  }
  BiLstmOutput<T> out{tp.layers.back().fwd.h, tp.layers.back().bwd.h};
  return out;
}

template <typename T>
void bilstm_backward(const LayerParams<T>& params, const BiLstmTape<T>& tape,
                     const Matrix<T>& d_fwd, const Matrix<T>& d_bwd,
                     LayerParams<T>& grads, Matrix<T>* d_inputs) {
  const std::size_t layers = params.shape.layers;
  if (tape.layers.size() != layers) {
    throw InvalidInputError("bilstm_backward: tape does not match the layer");
  }
  Matrix<T> df = d_fwd;
  Matrix<T> dbk = d_bwd;
  for (std::size_t li = layers; li-- > 0;) {
    const auto& tl = tape.layers[li];
    const std::size_t base = 6 * li;
    Matrix<T> dxf(tl.fwd_input.rows, tl.fwd_input.cols);
    Matrix<T> dxb(tl.bwd_input.rows, tl.bwd_input.cols);
    backprop_direction(params.weights[base], params.weights[base + 1],
                       tl.fwd_input, false, tl.fwd, df, grads.weights[base],
                       grads.weights[base + 1], grads.weights[base + 2], dxf);
    backprop_direction(params.weights[base + 3], params.weights[base + 4],
                       tl.bwd_input, true, tl.bwd, dbk,
                       grads.weights[base + 3], grads.weights[base + 4],
                       grads.weights[base + 5], dxb);
    df = std::move(dxf);
    dbk = std::move(dxb);
  }
  if (d_inputs) {
    if (!d_inputs->same_shape(df)) *d_inputs = Matrix<T>(df.rows, df.cols);
    for (std::size_t i = 0; i < df.data.size(); ++i) {
      d_inputs->data[i] += df.data[i] + dbk.data[i];
    }
  }
}

template BiLstmOutput<float> bilstm_forward<float>(const LayerParams<float>&,
                                                   const Matrix<float>&,
                                                   BiLstmTape<float>*);
template BiLstmOutput<double> bilstm_forward<double>(
    const LayerParams<double>&, const Matrix<double>&, BiLstmTape<double>*);
template void bilstm_backward<float>(const LayerParams<float>&,
                                     const BiLstmTape<float>&,
                                     const Matrix<float>&, const Matrix<float>&,
                                     LayerParams<float>&, Matrix<float>*);
template void bilstm_backward<double>(const LayerParams<double>&,
                                      const BiLstmTape<double>&,
                                      const Matrix<double>&,
                                      const Matrix<double>&,
                                      LayerParams<double>&, Matrix<double>*);

}  // namespace oovc::nn
