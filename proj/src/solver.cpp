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

#include "tfpaint/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "tfpaint/errors.hpp"

namespace tfpaint {

void SolverConfig::validate() const {
  auto fail = [](const std::string &msg) {
    throw InvalidArgument("invalid solver configuration: " + msg);
  };
  if (!(tau > 0.0) || !(sigma > 0.0) || !(eta > 0.0))
    fail("step sizes must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail("lambda must be nonnegative");
  if (!(alpha_relax > 0.0 && alpha_relax < 2.0)) fail("alpha_relax must lie in (0, 2)");
  if (inner_iters == 0) fail("inner_iters must be positive");
  if (!(epsilon >= 0.0)) fail("epsilon must be nonnegative");
  if (!(mag_floor >= 0.0)) fail("mag_floor must be nonnegative");
  constexpr double slack = 1e-12;
  if (!unsafe_step_sizes) {
    if (tau * sigma * kVariationNormSq > 1.0 + slack)
      fail("tau * sigma * 4 must not exceed 1");
    if (tau * eta * kAnalysisNormSq > 1.0 + slack) fail("tau * eta must not exceed 1");
  }
  effective_thresholder().validate();
}

Thresholder SolverConfig::effective_thresholder() const {
  Thresholder t = thresholder;
  t.lambda = lambda;
  return t;
}

SolverConfig SolverConfig::with_thresholder(ThresholderKind kind) {
  SolverConfig cfg;
  cfg.thresholder = Thresholder::defaults(kind);
  cfg.lambda = cfg.thresholder.lambda;
  return cfg;
}

SolverState SolverState::initial(const Spectrogram &X_corr) {
  const AnalysisWindows w = AnalysisWindows::tight_hann(X_corr.config);
  return {synthesize(X_corr, w.g, X_corr.config),
          ComplexMatrix(X_corr.rows(), X_corr.cols()),
          ComplexMatrix(X_corr.rows(), X_corr.cols() - 1)};
}

namespace {

// Everything fixed for one segment, in the half-spectrum representation.
struct Context {
  Context(const Spectrogram &X_corr, const ColumnMask &mask, const AnalysisWindows &w)
      : ana(X_corr.config, w.g), ana_d(X_corr.config, w.g_prime) {
    if (X_corr.rows() != X_corr.config.channels || X_corr.cols() != X_corr.config.frames())
      throw InvalidArgument("solver: spectrogram shape does not match its configuration");
    if (X_corr.cols() < 2) throw InvalidArgument("solver: needs at least two columns");
    if (mask.n_cols != X_corr.cols())
      throw InvalidArgument("solver: mask does not match spectrogram width");
    mask.validate();
    reliable = mask.reliable_flags();
    Xc = fold_hermitian(X_corr.data);
  }

  FrameOperator ana;
  FrameOperator ana_d;
  ComplexMatrix Xc;
  std::vector<unsigned char> reliable;
};

struct HalfState {
  RealVector x;
  ComplexMatrix Y;
  ComplexMatrix Z;
};

void check_finite(const RealVector &x, std::size_t iteration) {
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  if (!std::isfinite(s))
    throw DivergenceError("solver diverged at iteration " + std::to_string(iteration),
                          iteration);
}

void check_finite(const ComplexMatrix &X, std::size_t iteration) {
  double s = 0.0;
  for (const Complex &z : X.values()) s += z.real() + z.imag();
  if (!std::isfinite(s))
    throw DivergenceError("solver diverged at iteration " + std::to_string(iteration),
                          iteration);
}

// Z <- Q - sigma * T_{lambda/sigma}(Q / sigma), the conjugate prox of the
// penalty through the Moreau identity. `tmp` is scratch.
void dual_penalty_step(const ComplexMatrix &Q, ComplexMatrix &Z, ComplexMatrix &tmp,
                       const Thresholder &th, double sigma,
                       std::span<const double> weights) {
  tmp = Q;
  if (sigma != 1.0)
    for (Complex &z : tmp.values()) z /= sigma;
  th.apply(tmp, 1.0 / sigma, weights);
  if (Z.rows() != Q.rows() || Z.cols() != Q.cols()) Z = ComplexMatrix(Q.rows(), Q.cols());
  for (std::size_t i = 0; i < Q.size(); ++i)
    Z.values()[i] = Q.values()[i] - sigma * tmp.values()[i];
}

template <typename T>
void relax(T &current, T &half, double alpha) {
  if (alpha == 1.0) {
    std::swap(current, half);
    return;
  }
  auto &c = [&]() -> auto & {
    if constexpr (std::is_same_v<T, RealVector>) return current;
    else return current.values();
  }();
  const auto &h = [&]() -> const auto & {
    if constexpr (std::is_same_v<T, RealVector>) return half;
    else return half.values();
  }();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += alpha * (h[i] - c[i]);
}

double feasibility_residual(const Context &ctx, const ComplexMatrix &A) {
  double s = 0.0;
  const auto w = ctx.ana.row_weights();
  for (std::size_t n = 0; n < A.cols(); ++n) {
    if (!ctx.reliable[n]) continue;
    auto a = A.col(n);
    auto c = ctx.Xc.col(n);
    for (std::size_t m = 0; m < a.size(); ++m) s += w[m] * std::norm(a[m] - c[m]);
  }
  return std::sqrt(s);
}

// lambda * ||D R P(A)||_1, the composite objective at the feasible point
// nearest to the half spectrogram A.
double projected_objective(const Context &ctx, const PhaseRotation &rot, ComplexMatrix A,
                           double lambda) {
  project_feasible_columns(A, ctx.reliable, ctx.Xc);
  rot.apply(A);
  return lambda * ctx.ana.l1_norm(time_variation(A));
}

void emit_trace(const TraceFn &trace, const Context &ctx, const PhaseRotation &rot,
                const ComplexMatrix &A, double lambda, std::size_t outer,
                std::size_t inner) {
  trace(TraceEntry{outer, inner, projected_objective(ctx, rot, A, lambda),
                   feasibility_residual(ctx, A)});
}

// Generalized Chambolle-Pock iterations with K = ana, L = D R ana,
// f = indicator of the feasible set and g = penalty.
void run_gcpa(HalfState &s, const Context &ctx, const PhaseRotation &rot,
              const SolverConfig &cfg, std::size_t outer, const TraceFn &trace) {
  const Thresholder th = cfg.effective_thresholder();
  const auto weights = ctx.ana.row_weights();
  const double tau = cfg.tau, sigma = cfg.sigma, eta = cfg.eta;
  const std::size_t L = s.x.size(), H = s.Y.rows(), N = s.Y.cols();

  ComplexMatrix W, A, Yh(H, N), Zh(H, N - 1), Qs(H, N - 1);
  RealVector syn_buf, xt(L), xh(L);

  for (std::size_t i = 0; i < cfg.inner_iters; ++i) {
    // W = R* D* Z, shared by both primal updates.
    time_variation_adjoint(s.Z, W);
    rot.apply_adjoint(W);

    // x~ = x - tau syn(W + Y)
    if (!A.same_shape(W)) A = ComplexMatrix(H, N);
    for (std::size_t k = 0; k < A.size(); ++k)
      A.values()[k] = W.values()[k] + s.Y.values()[k];
    ctx.ana.synthesize_half(A, syn_buf);
    for (std::size_t l = 0; l < L; ++l) xt[l] = s.x[l] - tau * syn_buf[l];
    ctx.ana.analyze_half(xt, A);

    // R = Y + eta ana(x~), Y_half = R - eta proj(R / eta). The projection
    // keeps R / eta on missing columns, so Y_half vanishes there. A is
    // reused for W + Y_half.
    for (std::size_t n = 0; n < N; ++n) {
      auto y = s.Y.col(n);
      auto yh = Yh.col(n);
      auto an = A.col(n);
      auto w = W.col(n);
      if (ctx.reliable[n]) {
        auto c = ctx.Xc.col(n);
        for (std::size_t m = 0; m < H; ++m) {
          yh[m] = y[m] + eta * (an[m] - c[m]);
          an[m] = w[m] + yh[m];
        }
      } else {
        for (std::size_t m = 0; m < H; ++m) {
          yh[m] = Complex{};
          an[m] = w[m];
        }
      }
    }

    // x_half = x - tau syn(W + Y_half)
    ctx.ana.synthesize_half(A, syn_buf);
    for (std::size_t l = 0; l < L; ++l) {
      xh[l] = s.x[l] - tau * syn_buf[l];
      xt[l] = 2.0 * xh[l] - s.x[l];
    }

    // Q = Z + sigma D R ana(2 x_half - x), then
    // Z_half = Q - sigma T_{lambda/sigma}(Q / sigma).
    ctx.ana.analyze_half(xt, A);
    rot.apply(A);
    for (std::size_t n = 0; n + 1 < N; ++n) {
      auto a0 = A.col(n);
      auto a1 = A.col(n + 1);
      auto z = s.Z.col(n);
      auto q = Zh.col(n);
      auto qs = Qs.col(n);
      for (std::size_t m = 0; m < H; ++m) {
        q[m] = z[m] + sigma * (a0[m] - a1[m]);
        qs[m] = q[m] / sigma;
      }
    }
    th.apply(Qs, 1.0 / sigma, weights);
    for (std::size_t k = 0; k < Zh.size(); ++k) Zh.values()[k] -= sigma * Qs.values()[k];

    relax(s.x, xh, cfg.alpha_relax);
    relax(s.Y, Yh, cfg.alpha_relax);
    relax(s.Z, Zh, cfg.alpha_relax);
    check_finite(s.x, i);

    if (trace) {
      ctx.ana.analyze_half(s.x, A);
      emit_trace(trace, ctx, rot, A, cfg.lambda, outer, i);
    }
  }
  check_finite(s.Y, cfg.inner_iters);
  check_finite(s.Z, cfg.inner_iters);
}

PhaseRotation rotation_for(const Context &ctx, std::span<const double> signal,
                           const SolverConfig &cfg) {
  const StftConfig &sc = ctx.ana.config();
  return PhaseRotation(estimate_if_half(signal, ctx.ana, ctx.ana_d, cfg.mag_floor),
                       sc.hop, sc.channels);
}

Spectrogram finish(const Context &ctx, const Spectrogram &X_corr, const ComplexMatrix &half) {
  Spectrogram out{X_corr.config, expand_hermitian(half, X_corr.config.channels)};
  project_feasible_columns(out.data, ctx.reliable, X_corr.data);
  return out;
}

double distance(const RealVector &a, const RealVector &b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Shared outer loop: re-estimate the IF from the current estimate, run the
// inner solver, stop when two consecutive estimates (lagging one pass, as
// the stopping test compares x_hat^(j) with x_hat^(j-1)) are within epsilon.
template <typename Inner, typename Estimate>
std::pair<std::size_t, bool> outer_loop(const Context &ctx, const SolverConfig &cfg,
                                        RealVector x_hat0, Inner inner,
                                        Estimate estimate) {
  RealVector older, previous = std::move(x_hat0), current;
  bool have_older = false;
  std::size_t passes = 0;
  for (std::size_t j = 0; j <= cfg.outer_iters; ++j) {
    const PhaseRotation rot = rotation_for(ctx, previous, cfg);
    inner(rot, j);
    ++passes;
    current = estimate();
    if (have_older && distance(previous, older) < cfg.epsilon) return {passes, true};
    older = std::move(previous);
    previous = std::move(current);
    have_older = true;
  }
  return {passes, false};
}

}  // namespace

SolverState gcpa_inner(const SolverState &state0, const ColumnMask &mask,
                       const Spectrogram &X_corr, const IFMatrix &omega,
                       const SolverConfig &cfg, const TraceFn &trace) {
  return gcpa_inner(state0, mask, X_corr, omega, cfg,
                    AnalysisWindows::tight_hann(X_corr.config), trace);
}

SolverState gcpa_inner(const SolverState &state0, const ColumnMask &mask,
                       const Spectrogram &X_corr, const IFMatrix &omega,
                       const SolverConfig &cfg, const AnalysisWindows &windows,
                       const TraceFn &trace) {
  cfg.validate();
  const Context ctx(X_corr, mask, windows);
  const std::size_t M = X_corr.rows(), N = X_corr.cols();
  if (state0.x.size() != X_corr.config.signal_len || state0.Y.rows() != M ||
      state0.Y.cols() != N || state0.Z.rows() != M || state0.Z.cols() != N - 1)
    throw InvalidArgument("gcpa_inner: state shapes do not match the spectrogram");
  if (omega.rows() != M || omega.cols() != N)
    throw InvalidArgument("gcpa_inner: IF matrix shape does not match the spectrogram");

  RealMatrix omega_half(M / 2 + 1, N);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < omega_half.rows(); ++m) omega_half(m, n) = omega.omega(m, n);
  const PhaseRotation rot(omega_half, X_corr.config.hop, M);

  HalfState s{state0.x, fold_hermitian(state0.Y), fold_hermitian(state0.Z)};
  run_gcpa(s, ctx, rot, cfg, 0, trace);
  return {std::move(s.x), expand_hermitian(s.Y, M), expand_hermitian(s.Z, M)};
}

SolveResult uphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg, const TraceFn &trace) {
  return uphain_tf(X_corr, mask, cfg, AnalysisWindows::tight_hann(X_corr.config), trace);
}

SolveResult uphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg, const AnalysisWindows &windows,
                      const TraceFn &trace) {
  cfg.validate();
  const Context ctx(X_corr, mask, windows);
  const std::size_t M = X_corr.rows(), N = X_corr.cols();
  HalfState s{synthesize(X_corr, windows.g, X_corr.config), ComplexMatrix(M / 2 + 1, N),
              ComplexMatrix(M / 2 + 1, N - 1)};

  const auto [passes, stopped] = outer_loop(
      ctx, cfg, s.x,
      [&](const PhaseRotation &rot, std::size_t j) { run_gcpa(s, ctx, rot, cfg, j, trace); },
      [&] { return s.x; });
  return {finish(ctx, X_corr, ctx.ana.analyze_half(s.x)), passes, stopped};
}

SolveResult bphain_tf(const Spectrogram &X_corr, const ColumnMask &mask,
                      const SolverConfig &cfg, std::span<const double> oracle_signal,
                      const TraceFn &trace) {
  cfg.validate();
  const AnalysisWindows windows = AnalysisWindows::tight_hann(X_corr.config);
  const Context ctx(X_corr, mask, windows);
  const std::size_t M = X_corr.rows(), N = X_corr.cols();
  HalfState s{synthesize(X_corr, windows.g, X_corr.config), ComplexMatrix(M / 2 + 1, N),
              ComplexMatrix(M / 2 + 1, N - 1)};
  if (!oracle_signal.empty() && oracle_signal.size() != s.x.size())
    throw InvalidArgument("bphain_tf: oracle signal length does not match the segment");

  const PhaseRotation rot =
      rotation_for(ctx, oracle_signal.empty() ? std::span<const double>(s.x) : oracle_signal, cfg);
  run_gcpa(s, ctx, rot, cfg, 0, trace);
  return {finish(ctx, X_corr, ctx.ana.analyze_half(s.x)), 1, false};
}

SolveResult cpa_tf_only(const Spectrogram &X_corr, const ColumnMask &mask,
                        const SolverConfig &cfg, const TraceFn &trace) {
  cfg.validate();
  const AnalysisWindows windows = AnalysisWindows::tight_hann(X_corr.config);
  const Context ctx(X_corr, mask, windows);
  const Thresholder th = cfg.effective_thresholder();
  const auto weights = ctx.ana.row_weights();
  const double tau = cfg.tau, sigma = cfg.sigma;

  ComplexMatrix X = ctx.Xc;
  ComplexMatrix Z(X.rows(), X.cols() - 1);
  ComplexMatrix W, Xh, V, DRV, Q, Zh, tmp;

  auto inner = [&](const PhaseRotation &rot, std::size_t j) {
    for (std::size_t i = 0; i < cfg.inner_iters; ++i) {
      // X_half = proj(X - tau R* D* Z)
      time_variation_adjoint(Z, W);
      rot.apply_adjoint(W);
      Xh = X;
      for (std::size_t k = 0; k < Xh.size(); ++k) Xh.values()[k] -= tau * W.values()[k];
      project_feasible_columns(Xh, ctx.reliable, ctx.Xc);

      // Q = Z + sigma D R (2 X_half - X)
      V = Xh;
      for (std::size_t k = 0; k < V.size(); ++k)
        V.values()[k] = 2.0 * Xh.values()[k] - X.values()[k];
      rot.apply(V);
      time_variation(V, DRV);
      Q = Z;
      for (std::size_t k = 0; k < Q.size(); ++k) Q.values()[k] += sigma * DRV.values()[k];

      dual_penalty_step(Q, Zh, tmp, th, sigma, weights);
      relax(X, Xh, cfg.alpha_relax);
      relax(Z, Zh, cfg.alpha_relax);
      check_finite(X, i);
      if (trace) emit_trace(trace, ctx, rot, X, cfg.lambda, j, i);
    }
    check_finite(Z, cfg.inner_iters);
  };

  const auto [passes, stopped] =
      outer_loop(ctx, cfg, ctx.ana.synthesize_half(X), inner,
                 [&] { return ctx.ana.synthesize_half(X); });
  return {finish(ctx, X_corr, X), passes, stopped};
}

}  // namespace tfpaint
