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

#ifndef TFPAINT_SRC_FFT_HPP_
#define TFPAINT_SRC_FFT_HPP_

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>

namespace tfpaint::detail {

// Length-n real FFT pair backed by FFTW. Plans are created once per length
// and shared process-wide; execution uses the new-array interface on
// caller-owned aligned buffers, which FFTW guarantees to be thread-safe.
// Plans are built with FFTW_ESTIMATE so results do not depend on timing.
class RealFft {
 public:
  explicit RealFft(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t spectrum_size() const { return n_ / 2 + 1; }

  // Unnormalized: forward computes sum_k in[k] e^{-i 2 pi m k / n},
  // inverse computes sum_m X[m] e^{+i 2 pi m k / n} over the Hermitian
  // extension. inverse() overwrites its input.
  void forward(double *in, fftw_complex *out) const;
  void inverse(fftw_complex *in, double *out) const;

 private:
  struct Plans;
  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

struct FftwDeleter {
  void operator()(void *p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

inline RealBuffer alloc_real(std::size_t n) {
  return RealBuffer(fftw_alloc_real(n));
}
inline ComplexBuffer alloc_complex(std::size_t n) {
  return ComplexBuffer(fftw_alloc_complex(n));
}

// True when `p` may be handed to a plan created on fftw_alloc'd arrays.
inline bool plan_compatible(const void *p) {
  return fftw_alignment_of(static_cast<double *>(const_cast<void *>(p))) == 0;
}

}  // namespace tfpaint::detail

#endif  // TFPAINT_SRC_FFT_HPP_
