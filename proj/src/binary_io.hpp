// Copyright 2026 The locgc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Little-endian binary records shared by the sample cache and checkpoints.

#ifndef LOCGC_SRC_BINARY_IO_HPP
#define LOCGC_SRC_BINARY_IO_HPP

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "locgc/core.hpp"

namespace locgc::bin {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void raw(const void* data, std::size_t bytes) { out_.write(static_cast<const char*>(data), bytes); }
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void u64(std::uint64_t v) { raw(&v, sizeof v); }
  void i64(std::int64_t v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    raw(s.data(), s.size());
  }
  void doubles(const double* data, std::size_t n) {
    u64(n);
    raw(data, n * sizeof(double));
  }
  void matrix(const MatrixXd& m) {
    u64(static_cast<std::uint64_t>(m.rows()));
    u64(static_cast<std::uint64_t>(m.cols()));
    raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  Reader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  void raw(void* data, std::size_t bytes) {
    in_.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (!in_) throw ValidationError(what_ + ": truncated file");
  }
  std::uint32_t u32() { return pod<std::uint32_t>(); }
  std::uint64_t u64() { return pod<std::uint64_t>(); }
  std::int64_t i64() { return pod<std::int64_t>(); }
  double f64() { return pod<double>(); }
  std::uint64_t count(std::uint64_t limit) {
    const std::uint64_t n = u64();
    if (n > limit) throw ValidationError(what_ + ": corrupt length " + std::to_string(n));
    return n;
  }
  std::string str() {
    std::string s(count(1u << 24), '\0');
    raw(s.data(), s.size());
    return s;
  }
  std::vector<double> doubles() {
    std::vector<double> v(count(std::uint64_t{1} << 34));
    raw(v.data(), v.size() * sizeof(double));
    return v;
  }
  MatrixXd matrix() {
    const auto rows = static_cast<Index>(count(std::uint64_t{1} << 32));
    const auto cols = static_cast<Index>(count(std::uint64_t{1} << 32));
    MatrixXd m(rows, cols);
    raw(m.data(), static_cast<std::size_t>(m.size()) * sizeof(double));
    return m;
  }
  void expect_magic(const char (&magic)[8]) {
    char got[8];
    raw(got, 8);
    if (std::memcmp(got, magic, 8) != 0) throw ValidationError(what_ + ": not a recognised file (bad magic)");
  }
  const std::string& what() const { return what_; }

 private:
  template <typename T>
  T pod() {
    T v;
    raw(&v, sizeof v);
    return v;
  }

  std::istream& in_;
  std::string what_;
};

}  // namespace locgc::bin

#endif  // LOCGC_SRC_BINARY_IO_HPP
