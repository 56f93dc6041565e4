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

#ifndef TFPAINT_PHASE_PRIOR_HPP_
#define TFPAINT_PHASE_PRIOR_HPP_

#include <cstddef>
#include <span>

#include "tfpaint/matrix.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint {

// Relative instantaneous frequency per coefficient, in frequency bins: for a
// tone at bin mu + delta, the entry at bin m is about mu + delta - m.
struct IFMatrix {
  RealMatrix omega;

  std::size_t rows() const { return omega.rows(); }
  std::size_t cols() const { return omega.cols(); }
};

inline constexpr double kDefaultMagnitudeFloor = 1e-10;

// Tight analysis window and its time derivative, scaled consistently.
struct AnalysisWindows {
  Window g;
  Window g_prime;

  // Periodic Hann and its analytic derivative, made tight for `cfg`.
  static AnalysisWindows tight_hann(const StftConfig &cfg);
};

// omega = -Im(ana_{g'} x / ana_g x) * M / (2 pi). Entries whose magnitude
// |ana_g x| is below mag_floor * max |ana_g x| are set to zero.
IFMatrix estimate_if(std::span<const double> x, const Window &g,
                     const Window &g_prime, const StftConfig &cfg,
                     double mag_floor = kDefaultMagnitudeFloor);

// Half-spectrum variant used by the solvers. Rows 0..M/2 only; the negative
// frequencies satisfy omega[M-m] = -omega[m].
RealMatrix estimate_if_half(std::span<const double> x, const FrameOperator &ana_g,
                            const FrameOperator &ana_g_prime,
                            double mag_floor = kDefaultMagnitudeFloor);

// Precomputed unit-modulus factors exp(-i 2 pi a sum_{t<n} omega[m,t] / M).
// Works for full or half matrices, whichever shape omega has.
class PhaseRotation {
 public:
  PhaseRotation() = default;
  PhaseRotation(const RealMatrix &omega, std::size_t hop, std::size_t channels);

  std::size_t rows() const { return factors_.rows(); }
  std::size_t cols() const { return factors_.cols(); }
  const ComplexMatrix &factors() const { return factors_; }

  void apply(ComplexMatrix &X) const;
  void apply_adjoint(ComplexMatrix &X) const;

 private:
  ComplexMatrix factors_;
};

Spectrogram phase_correct(const Spectrogram &X, const IFMatrix &omega);
Spectrogram phase_correct_adjoint(const Spectrogram &X, const IFMatrix &omega);

// (D X)[m,n] = X[m,n] - X[m,n+1]; M x N -> M x (N-1).
ComplexMatrix time_variation(const ComplexMatrix &X);
void time_variation(const ComplexMatrix &X, ComplexMatrix &out);

// Adjoint of time_variation; M x (N-1) -> M x N.
ComplexMatrix time_variation_adjoint(const ComplexMatrix &Y);
void time_variation_adjoint(const ComplexMatrix &Y, ComplexMatrix &out);

// || D R_omega ana_g x ||_1 (sum of complex moduli over the full spectrogram).
double ipctv_value(std::span<const double> x, const IFMatrix &omega,
                   const Window &g, const StftConfig &cfg);

}  // namespace tfpaint

#endif  // TFPAINT_PHASE_PRIOR_HPP_
