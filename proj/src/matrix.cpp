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

#include "tfpaint/matrix.hpp"

#include <algorithm>
#include <cmath>

namespace tfpaint {

double frobenius_norm(const ComplexMatrix &a) {
  double s = 0.0;
  for (const Complex &z : a.values()) s += std::norm(z);
  return std::sqrt(s);
}

double l1_norm(const ComplexMatrix &a) {
  double s = 0.0;
  for (const Complex &z : a.values()) s += fast_abs(z);
  return s;
}

double inner_real(const ComplexMatrix &a, const ComplexMatrix &b) {
  double s = 0.0;
  const auto &av = a.values();
  const auto &bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i)
    s += av[i].real() * bv[i].real() + av[i].imag() * bv[i].imag();
  return s;
}

double max_abs(const ComplexMatrix &a) {
  double m = 0.0;
  for (const Complex &z : a.values()) m = std::max(m, fast_abs(z));
  return m;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace tfpaint
