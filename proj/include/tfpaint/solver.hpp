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

#ifndef TFPAINT_SOLVER_HPP_
#define TFPAINT_SOLVER_HPP_

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>

#include "tfpaint/mask.hpp"
#include "tfpaint/matrix.hpp"
#include "tfpaint/phase_prior.hpp"
#include "tfpaint/prox.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint {

// Squared operator-norm bounds used by the step-size conditions: the tight
// analysis operator has norm 1, and D R_omega ana is bounded by 2.
inline constexpr double kAnalysisNormSq = 1.0;
inline constexpr double kVariationNormSq = 4.0;

struct SolverConfig {
  double tau = 0.25;
  double sigma = 1.0;
  double eta = 4.0;
  double lambda = 0.01;
  std::size_t inner_iters = 500;
  std::size_t outer_iters = 10;
  double epsilon = 1e-3;
  double alpha_relax = 1.0;
  // The rule applied to the dual of the penalty. Its lambda field is ignored;
  // `lambda` above is used instead.
  Thresholder thresholder;
  double mag_floor = kDefaultMagnitudeFloor;
  // Skips the convergence conditions on tau, sigma and eta.
  bool unsafe_step_sizes = false;

  // Throws InvalidArgument when tau*sigma*4 > 1, tau*eta > 1 (unless
  // unsafe_step_sizes), alpha_relax is outside (0, 2), or counts are zero.
  void validate() const;

  Thresholder effective_thresholder() const;

  // Defaults with the lambda tuned for the given thresholder.
  static SolverConfig with_thresholder(ThresholderKind kind);
};

// Primal signal and the two dual variables of the generalized Chambolle-Pock
// iteration. Y and Z are Hermitian-symmetric in every iterate.
struct SolverState {
  RealVector x;
  ComplexMatrix Y;  // M x N
  ComplexMatrix Z;  // M x (N - 1)

  static SolverState initial(const Spectrogram &X_corr);
};

struct TraceEntry {
  std::size_t outer = 0;
  std::size_t inner = 0;
  // lambda * ||D R_omega P(ana x)||_1, where P restores the reliable
  // columns, so the feasibility indicator vanishes.
  double objective = 0.0;
  // ||M (ana x - X_corr)||_F over the reliable columns
  double feasibility_residual = 0.0;
};
using TraceFn = std::function<void(const TraceEntry &)>;

struct SolveResult {
  Spectrogram output;
  // Number of IF estimates (outer passes) actually run.
  std::size_t outer_iters_used = 0;
  bool early_stopped = false;
};

// `inner_iters` GCPA iterations on
//   lambda ||D R_omega ana x||_1 + indicator(ana x in feasible set)
// with omega fixed. Throws DivergenceError on non-finite iterates.
SolverState gcpa_inner(const SolverState &state0, const ColumnMask &mask,
                       const Spectrogram &X_corr, const IFMatrix &omega,
                       const SolverConfig &cfg, const TraceFn &trace = {});
SolverState gcpa_inner(const SolverState &state0, const ColumnMask &mask,
                       const Spectrogram &X_corr, const IFMatrix &omega,
                       const SolverConfig &cfg, const AnalysisWindows &windows,
                       const TraceFn &trace = {});

// Inpaints a peak-normalized segment with regular IF updates: up to
// outer_iters + 1 IF estimates, each followed by a warm-started inner run.
// Reliable columns of the output equal X_corr bit-exactly.
SolveResult uphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg, const TraceFn &trace = {});
SolveResult uphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg, const AnalysisWindows &windows,
                      const TraceFn &trace = {});

// IF estimated once, from syn(X_corr) or, when `oracle_signal` is non-empty,
// from that signal; then a single inner run.
SolveResult bphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg,
                      std::span<const double> oracle_signal = {},
                      const TraceFn &trace = {});

// Chambolle-Pock on lambda ||D R_omega X||_1 + indicator(X) with the primal
// variable in the TF domain; same outer IF-update structure as uphain_tf.
SolveResult cpa_tf_only(const Spectrogram &X_corr, const ColumnMask &mask,
                        const SolverConfig &cfg, const TraceFn &trace = {});

namespace detail {
inline double norm_of(const RealVector &v) { return norm2(v); }
inline double norm_of(const ComplexMatrix &v) { return frobenius_norm(v); }
inline void scale_by(RealVector &v, double s) {
  for (double &x : v) x *= s;
}
inline void scale_by(ComplexMatrix &v, double s) {
  for (Complex &x : v.values()) x *= s;
}
}  // namespace detail

// Power iteration on adjoint(apply(.)). Returns the largest ||apply(v)|| seen
// over unit vectors v, which approaches ||apply|| from below.
template <typename Domain, typename Apply, typename Adjoint>
double operator_norm_estimate(Apply apply, Adjoint adjoint, Domain probe,
                              std::size_t iters) {
  using detail::norm_of;
  using detail::scale_by;
  double n = norm_of(probe);
  if (!std::isfinite(n)) throw std::runtime_error("operator_norm_estimate: non-finite probe");
  if (n == 0.0) throw std::invalid_argument("operator_norm_estimate: zero probe");
  scale_by(probe, 1.0 / n);
  double estimate = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const auto image = apply(probe);
    const double gain = norm_of(image);
    if (!std::isfinite(gain))
      throw std::runtime_error("operator_norm_estimate: non-finite image");
    estimate = std::max(estimate, gain);
    probe = adjoint(image);
    n = norm_of(probe);
    if (n == 0.0) break;
    scale_by(probe, 1.0 / n);
  }
  return estimate;
}

}  // namespace tfpaint

#endif  // TFPAINT_SOLVER_HPP_
