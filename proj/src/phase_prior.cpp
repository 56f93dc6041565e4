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

#include "tfpaint/phase_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tfpaint/errors.hpp"

namespace tfpaint {

AnalysisWindows AnalysisWindows::tight_hann(const StftConfig &cfg) {
  const Window hann = make_hann(cfg.window_len);
  return {tight_window(hann, cfg),
          tight_companion(hann, make_hann_derivative(cfg.window_len), cfg)};
}

RealMatrix estimate_if_half(std::span<const double> x, const FrameOperator &ana_g,
                            const FrameOperator &ana_g_prime, double mag_floor) {
  const ComplexMatrix X = ana_g.analyze_half(x);
  const ComplexMatrix Xd = ana_g_prime.analyze_half(x);
  // Converts the per-sample angular rate of the ratio into bins.
  const double scale = static_cast<double>(ana_g.config().channels) /
                       (2.0 * std::numbers::pi);
  const double floor = mag_floor * max_abs(X);

  RealMatrix omega(X.rows(), X.cols(), 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Complex z = X.values()[i];
    const double mag2 = std::norm(z);
    if (mag2 == 0.0 || std::sqrt(mag2) < floor) continue;
    // Im(Xd / X) = Im(Xd conj(X)) / |X|^2
    const Complex w = Xd.values()[i];
    const double im = w.imag() * z.real() - w.real() * z.imag();
    omega.values()[i] = -im / mag2 * scale;
  }
  return omega;
}

IFMatrix estimate_if(std::span<const double> x, const Window &g,
                     const Window &g_prime, const StftConfig &cfg,
                     double mag_floor) {
  const FrameOperator op(cfg, g);
  const FrameOperator op_d(cfg, g_prime);
  const RealMatrix half = estimate_if_half(x, op, op_d, mag_floor);
  const std::size_t M = cfg.channels;
  IFMatrix out{RealMatrix(M, half.cols())};
  for (std::size_t n = 0; n < half.cols(); ++n)
    for (std::size_t m = 0; m < M; ++m)
      out.omega(m, n) = m < half.rows() ? half(m, n) : -half(M - m, n);
  return out;
}

PhaseRotation::PhaseRotation(const RealMatrix &omega, std::size_t hop,
                             std::size_t channels)
    : factors_(omega.rows(), omega.cols()) {
  const double rate = -2.0 * std::numbers::pi * static_cast<double>(hop) /
                      static_cast<double>(channels);
  for (std::size_t m = 0; m < omega.rows(); ++m) {
    double cumulative = 0.0;
    for (std::size_t n = 0; n < omega.cols(); ++n) {
      factors_(m, n) = std::polar(1.0, rate * cumulative);
      cumulative += omega(m, n);
    }
  }
}

void PhaseRotation::apply(ComplexMatrix &X) const {
  if (!X.same_shape(factors_))
    throw InvalidArgument("phase rotation: shape mismatch");
  for (std::size_t i = 0; i < X.size(); ++i) X.values()[i] *= factors_.values()[i];
}

void PhaseRotation::apply_adjoint(ComplexMatrix &X) const {
  if (!X.same_shape(factors_))
    throw InvalidArgument("phase rotation: shape mismatch");
  for (std::size_t i = 0; i < X.size(); ++i)
    X.values()[i] *= std::conj(factors_.values()[i]);
}

namespace {

void check_if_shape(const Spectrogram &X, const IFMatrix &omega) {
  if (X.rows() != omega.rows() || X.cols() != omega.cols())
    throw InvalidArgument("phase_correct: spectrogram is " + std::to_string(X.rows()) +
                          "x" + std::to_string(X.cols()) + " but IF matrix is " +
                          std::to_string(omega.rows()) + "x" +
                          std::to_string(omega.cols()));
}

}  // namespace

Spectrogram phase_correct(const Spectrogram &X, const IFMatrix &omega) {
  check_if_shape(X, omega);
  Spectrogram out = X;
  PhaseRotation(omega.omega, X.config.hop, X.config.channels).apply(out.data);
  return out;
}

Spectrogram phase_correct_adjoint(const Spectrogram &X, const IFMatrix &omega) {
  check_if_shape(X, omega);
  Spectrogram out = X;
  PhaseRotation(omega.omega, X.config.hop, X.config.channels).apply_adjoint(out.data);
  return out;
}

void time_variation(const ComplexMatrix &X, ComplexMatrix &out) {
  if (X.cols() < 2)
    throw InvalidArgument("time_variation: needs at least two columns");
  const std::size_t M = X.rows(), N = X.cols();
  if (out.rows() != M || out.cols() != N - 1) out = ComplexMatrix(M, N - 1);
  for (std::size_t n = 0; n + 1 < N; ++n) {
    auto a = X.col(n);
    auto b = X.col(n + 1);
    auto o = out.col(n);
    for (std::size_t m = 0; m < M; ++m) o[m] = a[m] - b[m];
  }
}

ComplexMatrix time_variation(const ComplexMatrix &X) {
  ComplexMatrix out;
  time_variation(X, out);
  return out;
}

void time_variation_adjoint(const ComplexMatrix &Y, ComplexMatrix &out) {
  if (Y.cols() < 1)
    throw InvalidArgument("time_variation_adjoint: needs at least one column");
  const std::size_t M = Y.rows(), N = Y.cols() + 1;
  if (out.rows() != M || out.cols() != N) out = ComplexMatrix(M, N);
  {
    auto o = out.col(0);
    auto y = Y.col(0);
    std::copy(y.begin(), y.end(), o.begin());
  }
  for (std::size_t n = 1; n + 1 < N; ++n) {
    auto cur = Y.col(n);
    auto prev = Y.col(n - 1);
    auto o = out.col(n);
    for (std::size_t m = 0; m < M; ++m) o[m] = cur[m] - prev[m];
  }
  {
    auto o = out.col(N - 1);
    auto y = Y.col(N - 2);
    for (std::size_t m = 0; m < M; ++m) o[m] = -y[m];
  }
}

ComplexMatrix time_variation_adjoint(const ComplexMatrix &Y) {
  ComplexMatrix out;
  time_variation_adjoint(Y, out);
  return out;
}

double ipctv_value(std::span<const double> x, const IFMatrix &omega,
                   const Window &g, const StftConfig &cfg) {
  const Spectrogram corrected = phase_correct(analyze(x, g, cfg), omega);
  return l1_norm(time_variation(corrected.data));
}

}  // namespace tfpaint
