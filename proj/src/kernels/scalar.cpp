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

#include "oovc/kernels.hpp"

namespace oovc::kernels {
namespace {

template <typename T>
T dot_ref(const T* a, const T* b, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy_ref(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void gemv_ref(const T* a, std::size_t rows, std::size_t cols, const T* x,
              T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] += dot_ref(a + r * cols, x, cols);
  }
}

template <typename T>
void gemv_t_ref(const T* a, std::size_t rows, std::size_t cols, const T* x,
                T* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (x[r] != T(0)) axpy_ref(x[r], a + r * cols, y, cols);
  }
}

template <typename T>
void ger_ref(T alpha, const T* x, std::size_t rows, const T* y,
             std::size_t cols, T* a) {
  for (std::size_t r = 0; r < rows; ++r) {
    const T s = alpha * x[r];
    if (s != T(0)) axpy_ref(s, y, a + r * cols, cols);
  }
}

}  // namespace

template <typename T>
const KernelTable<T>& scalar_table() {
  static const KernelTable<T> table{&dot_ref<T>, &axpy_ref<T>, &gemv_ref<T>,
                                    &gemv_t_ref<T>, &ger_ref<T>};
  return table;
}

template const KernelTable<float>& scalar_table<float>();
template const KernelTable<double>& scalar_table<double>();

}  // namespace oovc::kernels
