// Copyright 2026  The tfpaint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef TFPAINT_MATRIX_HPP_
#define TFPAINT_MATRIX_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tfpaint {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;

// Dense column-major matrix. Rows index frequency bins and columns index
// time frames, so one STFT frame is a contiguous column.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T value = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T &operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }
  const T &operator()(std::size_t r, std::size_t c) const {
    return data_[c * rows_ + r];
  }

  std::span<T> col(std::size_t c) {
    return {data_.data() + c * rows_, rows_};
  }
  std::span<const T> col(std::size_t c) const {
    return {data_.data() + c * rows_, rows_};
  }

  T *data() { return data_.data(); }
  const T *data() const { return data_.data(); }
  std::vector<T> &values() { return data_; }
  const std::vector<T> &values() const { return data_; }

  bool same_shape(const Matrix &o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  bool operator==(const Matrix &o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ComplexMatrix = Matrix<Complex>;
using RealMatrix = Matrix<double>;

// |z| without the overflow guards of std::abs; values here are O(1).
inline double fast_abs(Complex z) {
  return std::sqrt(z.real() * z.real() + z.imag() * z.imag());
}

double frobenius_norm(const ComplexMatrix &a);
// Sum of entrywise moduli.
double l1_norm(const ComplexMatrix &a);
// Re <a, b> = sum Re(a * conj(b)); the inner product that makes analysis and
// synthesis adjoint between R^L and C^{M x N}.
double inner_real(const ComplexMatrix &a, const ComplexMatrix &b);
double max_abs(const ComplexMatrix &a);

double norm2(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace tfpaint

#endif  // TFPAINT_MATRIX_HPP_
