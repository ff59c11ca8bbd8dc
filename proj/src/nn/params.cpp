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

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kGru: return "gru";
    case LayerKind::kBiLstm: return "lstm-bidirectional";
    case LayerKind::kConvMaxPool: return "conv-maxpool";
    case LayerKind::kEmbedding: return "embedding";
  }
  return "unknown";
}

std::vector<std::pair<std::size_t, std::size_t>> weight_shapes(
    LayerKind kind, const LayerShape& shape) {
  if (shape.input_dim == 0 || shape.hidden_dim == 0 || shape.layers == 0) {
    throw InvalidConfigError(std::string("zero dimension in ") +
                             to_string(kind) + " layer shape");
  }
  const std::size_t in = shape.input_dim;
  const std::size_t h = shape.hidden_dim;
  std::vector<std::pair<std::size_t, std::size_t>> out;
  switch (kind) {
    case LayerKind::kDense:
      out = {{h, in}, {h, 1}};
      break;
    case LayerKind::kEmbedding:
      out = {{in, h}};
      break;
    case LayerKind::kGru:
      for (std::size_t l = 0; l < shape.layers; ++l) {
        const std::size_t layer_in = l == 0 ? in : h;
        out.push_back({3 * h, layer_in});
        out.push_back({3 * h, h});
        out.push_back({3 * h, 1});
      }
      break;
    case LayerKind::kBiLstm:
      for (std::size_t l = 0; l < shape.layers; ++l) {
        const std::size_t layer_in = l == 0 ? in : h;
        for (int dir = 0; dir < 2; ++dir) {
          out.push_back({4 * h, layer_in});
          out.push_back({4 * h, h});
          out.push_back({4 * h, 1});
        }
      }
      break;
    case LayerKind::kConvMaxPool:
      if (shape.filter_widths.empty()) {
        throw InvalidConfigError("conv layer needs at least one filter width");
      }
      for (std::size_t w : shape.filter_widths) {
        if (w == 0) throw InvalidConfigError("zero filter width");
        out.push_back({h, w * in});
        out.push_back({h, 1});
      }
      break;
  }
  return out;
}

namespace {

bool is_bias(LayerKind kind, std::size_t index) {
  switch (kind) {
    case LayerKind::kDense: return index == 1;
    case LayerKind::kGru:
    case LayerKind::kBiLstm: return index % 3 == 2;
    case LayerKind::kConvMaxPool: return index % 2 == 1;
    case LayerKind::kEmbedding: return false;
  }
  return false;
}

}  // namespace

template <typename T>
LayerParams<T> zero_params(LayerKind kind, const LayerShape& shape) {
  LayerParams<T> p;
  p.kind = kind;
  p.shape = shape;
  for (auto [r, c] : weight_shapes(kind, shape)) p.weights.emplace_back(r, c);
  return p;
}

template <typename T>
LayerParams<T> init_params(LayerKind kind, const LayerShape& shape,
                           InitSpec init, std::uint64_t seed) {
  if (init.mode == InitMode::kUniform && !(init.range > 0.0)) {
    throw InvalidConfigError("uniform init range must be positive");
  }
  LayerParams<T> p = zero_params<T>(kind, shape);
  Rng rng(seed);
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    Matrix<T>& w = p.weights[i];
    double bound = init.range;
    if (init.mode == InitMode::kGlorot) {
      if (is_bias(kind, i)) {
        // Forget-gate bias starts at one so early gradients flow.
        if (kind == LayerKind::kBiLstm) {
          const std::size_t h = shape.hidden_dim;
          for (std::size_t j = h; j < 2 * h; ++j) w.data[j] = T(1);
        }
        continue;
      }
      bound = std::sqrt(6.0 / static_cast<double>(w.rows + w.cols));
    }
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& x : w.data) x = static_cast<T>(dist(rng));
  }
  return p;
}

template <typename T>
void check_params(const LayerParams<T>& params) {
  const auto shapes = weight_shapes(params.kind, params.shape);
  if (shapes.size() != params.weights.size()) {
    throw InvalidConfigError(std::string("wrong weight count for ") +
                             to_string(params.kind) + " layer");
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    const auto& w = params.weights[i];
    if (w.rows != shapes[i].first || w.cols != shapes[i].second ||
        w.data.size() != w.rows * w.cols) {
      throw InvalidConfigError(std::string("weight ") + std::to_string(i) +
                               " of " + to_string(params.kind) +
                               " layer has the wrong shape");
    }
  }
}

template <typename T>
LayerParams<T> LayerParams<T>::zeros_like() const {
  LayerParams out;
  out.kind = kind;
  out.shape = shape;
  for (const auto& w : weights) out.weights.emplace_back(w.rows, w.cols);
  return out;
}

template <typename T>
std::size_t LayerParams<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  return n;
}

template <typename T>
std::vector<Matrix<T>*> LayerParams<T>::pointers() {
  std::vector<Matrix<T>*> out;
  for (auto& w : weights) out.push_back(&w);
  return out;
}

template <typename T>
std::vector<const Matrix<T>*> LayerParams<T>::pointers() const {
  std::vector<const Matrix<T>*> out;
  for (const auto& w : weights) out.push_back(&w);
  return out;
}

template <typename T>
void LayerParams<T>::set_zero() {
  for (auto& w : weights) w.fill(T(0));
}

template struct LayerParams<float>;
template struct LayerParams<double>;
template LayerParams<float> init_params<float>(LayerKind, const LayerShape&,
                                               InitSpec, std::uint64_t);
template LayerParams<double> init_params<double>(LayerKind, const LayerShape&,
                                                 InitSpec, std::uint64_t);
template LayerParams<float> zero_params<float>(LayerKind, const LayerShape&);
template LayerParams<double> zero_params<double>(LayerKind, const LayerShape&);
template void check_params<float>(const LayerParams<float>&);
template void check_params<double>(const LayerParams<double>&);

}  // namespace oovc::nn
