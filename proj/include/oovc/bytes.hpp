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

// Little-endian byte buffers used by the model container.

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "oovc/error.hpp"
#include "oovc/tensor.hpp"

namespace oovc {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

class ByteWriter {
 public:
  template <typename T>
    requires std::is_arithmetic_v<T>
  void put(T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf_.append(raw, sizeof(T));
  }
  void u32(std::uint32_t v) { put(v); }
  void u64(std::uint64_t v) { put(v); }
  void f64(double v) { put(v); }
  void str(std::string_view s) {
    u64(s.size());
    buf_.append(s);
  }
  template <typename T>
  void matrix(const Matrix<T>& m) {
    u64(m.rows);
    u64(m.cols);
    buf_.append(reinterpret_cast<const char*>(m.data.data()),
                m.data.size() * sizeof(T));
  }
  void raw(std::string_view s) { buf_.append(s); }

  const std::string& bytes() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data, std::string what = "section")
      : data_(data), what_(std::move(what)) {}

  template <typename T>
    requires std::is_arithmetic_v<T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::uint32_t u32() { return get<std::uint32_t>(); }
  std::uint64_t u64() { return get<std::uint64_t>(); }
  double f64() { return get<double>(); }
  std::string str() {
    const std::uint64_t n = u64();
    need(n);
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  template <typename T>
  Matrix<T> matrix() {
    const std::uint64_t rows = u64();
    const std::uint64_t cols = u64();
    if (cols != 0 && rows > (data_.size() - pos_) / sizeof(T) / cols) {
      fail();
    }
    Matrix<T> m(rows, cols);
    need(m.data.size() * sizeof(T));
    std::memcpy(m.data.data(), data_.data() + pos_, m.data.size() * sizeof(T));
    pos_ += m.data.size() * sizeof(T);
    return m;
  }
  // Sizes read from a blob are bounded by the bytes that remain.
  std::uint64_t count(std::uint64_t min_bytes_each = 1) {
    const std::uint64_t n = u64();
    if (min_bytes_each != 0 && n > remaining() / min_bytes_each) fail();
    return n;
  }

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  void expect_done() const {
    if (!done()) {
      throw ContainerError(what_ + ": " + std::to_string(remaining()) +
                           " trailing bytes");
    }
  }

 private:
  void need(std::size_t n) const {
    if (n > data_.size() - pos_) fail();
  }
  [[noreturn]] void fail() const {
    throw ContainerError(what_ + ": truncated data");
  }

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace oovc
