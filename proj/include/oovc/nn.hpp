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

// Minimal neural-network substrate: parameter initialization, forward and
// backward passes for the few layer kinds the classifiers need, losses,
// dropout and Adam.
//
// Every forward function optionally records a tape. The matching backward
// function consumes that tape and *accumulates* into a gradient LayerParams
// of identical shape, so gradients from several examples can be summed
// before one optimizer step.
//
// All kernels are templates instantiated for float (training) and double
// (finite-difference checks).

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "oovc/tensor.hpp"

namespace oovc::nn {

using Rng = std::mt19937_64;

enum class LayerKind : std::uint32_t {
  kDense = 0,
  kGru = 1,
  kBiLstm = 2,
  kConvMaxPool = 3,
  kEmbedding = 4,
};

const char* to_string(LayerKind kind);

// Sizes of a layer. Meaning depends on the kind:
//   dense      input_dim -> hidden_dim (output width)
//   gru        input_dim per step, hidden_dim units, `layers` stacked
//   bilstm     input_dim per step, hidden_dim units per direction, `layers`
//   conv       input_dim per step, hidden_dim filters per width
//   embedding  input_dim rows, hidden_dim columns
struct LayerShape {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t layers = 1;
  std::vector<std::size_t> filter_widths;

  bool operator==(const LayerShape&) const = default;
};

enum class InitMode { kGlorot, kUniform };

struct InitSpec {
  InitMode mode = InitMode::kGlorot;
  double range = 0.05;  // only used by kUniform
};

template <typename T>
struct LayerParams {
  LayerKind kind = LayerKind::kDense;
  LayerShape shape;
  std::vector<Matrix<T>> weights;

  LayerParams zeros_like() const;
  std::size_t parameter_count() const;
  std::vector<Matrix<T>*> pointers();
  std::vector<const Matrix<T>*> pointers() const;
  void set_zero();

  bool operator==(const LayerParams&) const = default;
};

// Expected weight shapes for `kind`/`shape`; throws InvalidConfigError on
// zero sizes or an empty filter list.
std::vector<std::pair<std::size_t, std::size_t>> weight_shapes(
    LayerKind kind, const LayerShape& shape);

template <typename T>
LayerParams<T> init_params(LayerKind kind, const LayerShape& shape,
                           InitSpec init, std::uint64_t seed);

template <typename T>
LayerParams<T> zero_params(LayerKind kind, const LayerShape& shape);

// Throws InvalidConfigError if the weight list does not match the shape.
template <typename T>
void check_params(const LayerParams<T>& params);

template <typename To, typename From>
LayerParams<To> cast_params(const LayerParams<From>& p) {
  LayerParams<To> out;
  out.kind = p.kind;
  out.shape = p.shape;
  for (const auto& w : p.weights) out.weights.push_back(cast_matrix<To>(w));
  return out;
}

// ---------------------------------------------------------------- dense --

enum class Activation { kIdentity, kTanh, kSoftmax };

template <typename T>
Vector<T> softmax(std::span<const T> logits);

template <typename T>
Vector<T> dense_forward(const LayerParams<T>& params, std::span<const T> input,
                        Activation activation);

// `output` is what dense_forward returned. `d_input` may be empty; otherwise
// the input gradient is added into it.
template <typename T>
void dense_backward(const LayerParams<T>& params, std::span<const T> input,
                    std::span<const T> output, Activation activation,
                    std::span<const T> d_output, LayerParams<T>& grads,
                    std::span<T> d_input);

// ------------------------------------------------------------------ gru --
//
// z  = sigmoid(W_z x + U_z h + b_z)
// r  = sigmoid(W_r x + U_r h + b_r)
// h~ = tanh(W_h x + U_h (r * h) + b_h)
// h' = (1 - z) * h + z * h~
//
// Layer l>0 consumes the hidden sequence of layer l-1.

template <typename T>
struct GruTape {
  struct Layer {
    Matrix<T> input;
    Matrix<T> z, r, cand, reset_h;
    Matrix<T> h;  // steps + 1 rows, row 0 is the initial state
  };
  std::vector<Layer> layers;
};

template <typename T>
struct GruOutput {
  std::vector<Matrix<T>> states;  // per layer, steps x hidden

  const Matrix<T>& top() const { return states.back(); }
  std::span<const T> last() const { return top().row(top().rows - 1); }
};

template <typename T>
GruOutput<T> gru_forward(const LayerParams<T>& params, const Matrix<T>& inputs,
                         std::span<const T> h0 = {}, GruTape<T>* tape = nullptr);

// `d_top` holds d(loss)/d(state) for every step of the top layer.
template <typename T>
void gru_backward(const LayerParams<T>& params, const GruTape<T>& tape,
                  const Matrix<T>& d_top, LayerParams<T>& grads,
                  Matrix<T>* d_inputs);

// --------------------------------------------------------------- bilstm --
//
// Standard LSTM cell with input/forget/cell/output gates. The backward
// direction reads the sequence reversed with its own weights. Directions are
// stacked independently, so the forward state at t sees only inputs 1..t
// and the backward state at t only inputs t..k, at every depth.

template <typename T>
struct LstmDirTape {
  Matrix<T> gates;  // steps x 4H: i, f, g, o (post-activation)
  Matrix<T> c;      // steps x H
  Matrix<T> tanh_c;
  Matrix<T> h;
};

template <typename T>
struct BiLstmTape {
  struct Layer {
    Matrix<T> fwd_input, bwd_input;
    LstmDirTape<T> fwd, bwd;
  };
  std::vector<Layer> layers;
};

template <typename T>
struct BiLstmOutput {
  Matrix<T> fwd;  // steps x H, row t = forward state after reading 1..t
  Matrix<T> bwd;  // steps x H, row t = backward state after reading k..t
};

template <typename T>
BiLstmOutput<T> bilstm_forward(const LayerParams<T>& params,
                               const Matrix<T>& inputs,
                               BiLstmTape<T>* tape = nullptr);

template <typename T>
void bilstm_backward(const LayerParams<T>& params, const BiLstmTape<T>& tape,
                     const Matrix<T>& d_fwd, const Matrix<T>& d_bwd,
                     LayerParams<T>& grads, Matrix<T>* d_inputs);

// ------------------------------------------------------ conv + max-pool --
//
// One bank of `hidden_dim` linear filters per width. The response of each
// filter is max-pooled over all positions; ties go to the earliest position.
// Widths longer than the sequence contribute a zero block.

template <typename T>
struct ConvTape {
  Matrix<T> input;
  std::vector<std::vector<std::size_t>> argmax;  // per width, per filter
  std::vector<bool> active;                      // per width
};

template <typename T>
Vector<T> conv_maxpool_forward(const LayerParams<T>& params,
                               const Matrix<T>& inputs,
                               ConvTape<T>* tape = nullptr);

template <typename T>
void conv_maxpool_backward(const LayerParams<T>& params,
                           const ConvTape<T>& tape, std::span<const T> d_output,
                           LayerParams<T>& grads, Matrix<T>* d_inputs);

// ------------------------------------------------------------ embedding --

template <typename T>
Matrix<T> embedding_forward(const LayerParams<T>& params,
                            std::span<const std::size_t> ids);

template <typename T>
void embedding_backward(std::span<const std::size_t> ids,
                        const Matrix<T>& d_output, LayerParams<T>& grads);

// --------------------------------------------------------------- losses --

enum class LossKind { kCrossEntropy, kMse };

// Throws InvalidInputError unless `probs` sums to 1 within 1e-6.
template <typename T>
double cross_entropy(std::span<const T> probs, std::size_t target);

// Mean of squared component differences.
template <typename T>
double mse(std::span<const T> prediction, std::span<const T> target);

// d(mse)/d(prediction), added into `grad`.
template <typename T>
void mse_gradient(std::span<const T> prediction, std::span<const T> target,
                  std::span<T> grad, T scale = T(1));

// d(cross_entropy(softmax(z)))/dz = p - onehot(target).
template <typename T>
Vector<T> softmax_cross_entropy_gradient(std::span<const T> probs,
                                         std::size_t target);

// --------------------------------------------------------------- dropout --

// Training mode zeroes entries with probability `rate` and scales survivors
// by 1/(1-rate); evaluation mode is the identity. When `mask` is given it
// receives the per-entry multiplier used.
template <typename T>
Vector<T> dropout_apply(std::span<const T> input, double rate, bool training,
                        Rng& rng, std::vector<T>* mask = nullptr);

template <typename T>
Vector<T> dropout_apply(std::span<const T> input, double rate, bool training,
                        std::uint64_t seed);

// Unit-norm copy; the zero vector is returned unchanged.
template <typename T>
Vector<T> l2_normalize(std::span<const T> v);

// ------------------------------------------------------------------ adam --

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename T>
struct AdamState {
  AdamConfig config;
  std::vector<Matrix<T>> m;
  std::vector<Matrix<T>> v;
  std::uint64_t step = 0;
};

template <typename T>
AdamState<T> make_adam_state(const AdamConfig& config,
                             std::span<const Matrix<T>* const> params);

// Restricts the update of one parameter to a subset of its rows. Rows not
// listed are left untouched, moments included.
struct RowSubset {
  std::size_t param_index;
  std::span<const std::size_t> rows;
};

// One bias-corrected Adam update. Throws TrainingError (leaving everything
// untouched) if any gradient entry is not finite.
template <typename T>
void adam_step(AdamState<T>& state, std::span<Matrix<T>* const> params,
               std::span<const Matrix<T>* const> grads,
               std::span<const RowSubset> sparse = {});

}  // namespace oovc::nn
