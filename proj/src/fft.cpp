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

#include "fft.hpp"

#include <map>
#include <mutex>

namespace tfpaint::detail {

// Plans live for the whole process and are never destroyed.
struct RealFft::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
};

RealFft::RealFft(std::size_t n) : n_(n) {
  // The FFTW planner is not reentrant.
  static std::mutex planner_mutex;
  static std::map<std::size_t, std::shared_ptr<const Plans>> cache;

  std::lock_guard<std::mutex> lock(planner_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto p = std::make_shared<Plans>();
    RealBuffer in = alloc_real(n);
    ComplexBuffer out = alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    p->r2c = fftw_plan_dft_r2c_1d(len, in.get(), out.get(), FFTW_ESTIMATE);
    p->c2r = fftw_plan_dft_c2r_1d(len, out.get(), in.get(), FFTW_ESTIMATE);
    it = cache.emplace(n, std::move(p)).first;
  }
  plans_ = it->second;
}

void RealFft::forward(double *in, fftw_complex *out) const {
  fftw_execute_dft_r2c(plans_->r2c, in, out);
}

void RealFft::inverse(fftw_complex *in, double *out) const {
  fftw_execute_dft_c2r(plans_->c2r, in, out);
}

}  // namespace tfpaint::detail
