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

#ifndef TFPAINT_PROX_HPP_
#define TFPAINT_PROX_HPP_

#include <functional>
#include <span>
#include <string>

#include "tfpaint/mask.hpp"
#include "tfpaint/matrix.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint {

enum class ThresholderKind { kSoft, kPShrinkage, kSmoothHard, kL2Block, kL2Squared };

// A thresholding rule used in place of the proximal operator of lambda*||.||_1.
// kSoft, kL2Block and kL2Squared are true proximal operators (of the l1,
// Frobenius and squared Frobenius norms); kPShrinkage (p < 1) and kSmoothHard
// are non-convex plug-ins.
struct Thresholder {
  ThresholderKind kind = ThresholderKind::kSoft;
  double lambda = 0.01;
  double p = 1.0;        // p-shrinkage only, in (-1, 1]
  double alpha = 1e-2;   // smooth-hard only, > 0

  void validate() const;

  // Tuned defaults: soft lambda 0.01; p-shrinkage p 0.9 with lambda 0.01;
  // smooth-hard alpha 1e-2 with lambda 1e-3; l2 lambda 1; l2^2 lambda 0.2.
  static Thresholder defaults(ThresholderKind kind);

  // Applies the rule with lambda multiplied by `scale`, in place.
  // `row_weights` (optional) weights rows in the global norm of kL2Block so
  // that half-spectrum matrices give the full-matrix result.
  void apply(ComplexMatrix &X, double scale = 1.0,
             std::span<const double> row_weights = {}) const;
};

std::string to_string(ThresholderKind kind);
// Accepts soft, pshrink, smoothhard, l2, l2sq.
ThresholderKind parse_thresholder_kind(const std::string &name);

// sgn(X) max(|X| - lambda, 0), with sgn(0) = 0.
ComplexMatrix soft_threshold(const ComplexMatrix &X, double lambda);

// sgn(X) max(|X| - lambda^{2-p} |X|^{p-1}, 0); zero entries stay zero.
ComplexMatrix p_shrinkage(const ComplexMatrix &X, double lambda, double p);

// X exp(-alpha / (e^{|X| - lambda} - 1)^2) for |X| > lambda, else 0.
ComplexMatrix smooth_hard(const ComplexMatrix &X, double lambda, double alpha);

// Proximal operator of lambda * ||.||_F over the whole matrix.
ComplexMatrix prox_l2_block(const ComplexMatrix &X, double lambda);

// Proximal operator of lambda * ||.||_F^2, i.e. X / (1 + 2 lambda).
ComplexMatrix prox_l2_squared(const ComplexMatrix &X, double lambda);

// Reliable columns taken from X_corrupted, missing columns from X.
Spectrogram project_feasible(const Spectrogram &X, const ColumnMask &mask,
                             const Spectrogram &X_corrupted);
// In-place kernel: reliable[n] != 0 selects column n of X_corrupted.
void project_feasible_columns(ComplexMatrix &X, std::span<const unsigned char> reliable,
                              const ComplexMatrix &X_corrupted);

// prox of (scale * f), evaluated at the argument.
using ProxFn = std::function<ComplexMatrix(const ComplexMatrix &, double scale)>;

// Moreau identity: prox_{eta f*}(X) = X - eta * prox_{f/eta}(X / eta).
ComplexMatrix prox_conjugate(const ProxFn &base, double eta, const ComplexMatrix &X);

}  // namespace tfpaint

#endif  // TFPAINT_PROX_HPP_
