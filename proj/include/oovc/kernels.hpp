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

// Dense arithmetic inner loops used by every layer. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2+FMA
// variant. The variant is picked once at runtime; OOVC_ISA=scalar in the
// environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace oovc::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

template <typename T>
struct KernelTable {
  // sum_i a[i] * b[i]
  T (*dot)(const T* a, const T* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(T alpha, const T* x, T* y, std::size_t n);
  // y += A x, A is rows x cols row-major
  void (*gemv)(const T* a, std::size_t rows, std::size_t cols, const T* x,
               T* y);
  // y += A^T x
  void (*gemv_t)(const T* a, std::size_t rows, std::size_t cols, const T* x,
                 T* y);
  // A += alpha * x y^T, x has rows entries and y has cols entries
  void (*ger)(T alpha, const T* x, std::size_t rows, const T* y,
              std::size_t cols, T* a);
};

template <typename T>
const KernelTable<T>& scalar_table();

// Returns nullptr when the binary was built without AVX2 support.
template <typename T>
const KernelTable<T>* avx2_table();

bool cpu_has_avx2();

Isa active_isa();
// Overrides the runtime choice; requesting AVX2 on a CPU without it is
// ignored and the scalar table stays active.
void set_isa(Isa isa);

template <typename T>
const KernelTable<T>& active();

template <typename T>
inline T dot(std::span<const T> a, std::span<const T> b) {
  return active<T>().dot(a.data(), b.data(), a.size());
}

template <typename T>
inline void axpy(T alpha, std::span<const T> x, std::span<T> y) {
  active<T>().axpy(alpha, x.data(), y.data(), x.size());
}

template <typename T>
inline void gemv(const T* a, std::size_t rows, std::size_t cols, const T* x,
                 T* y) {
  active<T>().gemv(a, rows, cols, x, y);
}

template <typename T>
inline void gemv_t(const T* a, std::size_t rows, std::size_t cols, const T* x,
                   T* y) {
  active<T>().gemv_t(a, rows, cols, x, y);
}

template <typename T>
inline void ger(T alpha, const T* x, std::size_t rows, const T* y,
                std::size_t cols, T* a) {
  active<T>().ger(alpha, x, rows, y, cols, a);
}

}  // namespace oovc::kernels
