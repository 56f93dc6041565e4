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

#include "tfpaint/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "fft.hpp"
#include "tfpaint/errors.hpp"

namespace tfpaint {

namespace {

[[noreturn]] void config_error(const std::string &msg) {
  throw InvalidArgument("invalid STFT configuration: " + msg);
}

}  // namespace

void StftConfig::validate_geometry() const {
  if (window_len < 2) config_error("window_len must be at least 2");
  if (hop == 0) config_error("hop must be positive");
  if (hop > window_len) config_error("hop must not exceed window_len");
  if (channels < window_len) config_error("channels must be at least window_len");
}

void StftConfig::validate() const {
  auto fail = config_error;
  validate_geometry();
  if (signal_len == 0) fail("signal_len must be positive");
  if (signal_len % hop != 0) fail("hop must divide signal_len");
  if (signal_len < window_len) fail("signal_len must be at least window_len");
}

StftConfig StftConfig::defaults(std::size_t signal_len) {
  return StftConfig{2048, 512, 2048, signal_len};
}

Window make_hann(std::size_t window_len) {
  if (window_len < 2) throw InvalidArgument("make_hann: window_len < 2");
  Window w{RealVector(window_len), WindowKind::kHann};
  const double n = static_cast<double>(window_len);
  for (std::size_t k = 0; k < window_len; ++k)
    w.samples[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * k / n));
  return w;
}

Window make_hann_derivative(std::size_t window_len) {
  if (window_len < 2)
    throw InvalidArgument("make_hann_derivative: window_len < 2");
  Window w{RealVector(window_len), WindowKind::kHannDerivative};
  const double n = static_cast<double>(window_len);
  for (std::size_t k = 0; k < window_len; ++k)
    w.samples[k] = std::numbers::pi / n * std::sin(2.0 * std::numbers::pi * k / n);
  return w;
}

namespace {

// 1 / sqrt(M * d[k mod hop]) where d is the frame-operator diagonal.
RealVector tight_scale(const Window &g, const StftConfig &cfg) {
  if (g.size() != cfg.window_len)
    throw InvalidArgument("tight_window: window length does not match config");
  if (cfg.hop == 0 || cfg.channels < cfg.window_len)
    throw InvalidArgument("tight_window: requires hop > 0 and channels >= window_len");
  const std::size_t a = cfg.hop;
  RealVector diag(a, 0.0);
  for (std::size_t k = 0; k < g.size(); ++k) diag[k % a] += g[k] * g[k];
  RealVector scale(a);
  for (std::size_t r = 0; r < a; ++r) {
    if (!(diag[r] > 0.0))
      throw DegenerateWindow("frame operator diagonal is not positive at offset " +
                             std::to_string(r));
    scale[r] = 1.0 / std::sqrt(static_cast<double>(cfg.channels) * diag[r]);
  }
  return scale;
}

}  // namespace

Window tight_window(const Window &g, const StftConfig &cfg) {
  const RealVector scale = tight_scale(g, cfg);
  Window out = g;
  for (std::size_t k = 0; k < out.size(); ++k)
    out.samples[k] *= scale[k % cfg.hop];
  return out;
}

Window tight_companion(const Window &g, const Window &companion,
                       const StftConfig &cfg) {
  if (companion.size() != g.size())
    throw InvalidArgument("tight_companion: window lengths differ");
  const RealVector scale = tight_scale(g, cfg);
  Window out = companion;
  for (std::size_t k = 0; k < out.size(); ++k)
    out.samples[k] *= scale[k % cfg.hop];
  return out;
}

ComplexMatrix fold_hermitian(const ComplexMatrix &full) {
  const std::size_t M = full.rows();
  const std::size_t H = M / 2 + 1;
  ComplexMatrix half(H, full.cols());
  for (std::size_t n = 0; n < full.cols(); ++n) {
    auto src = full.col(n);
    auto dst = half.col(n);
    dst[0] = src[0].real();
    for (std::size_t m = 1; m < H; ++m) {
      const std::size_t mirror = M - m;
      if (mirror == m)
        dst[m] = src[m].real();
      else
        dst[m] = 0.5 * (src[m] + std::conj(src[mirror]));
    }
  }
  return half;
}

ComplexMatrix expand_hermitian(const ComplexMatrix &half, std::size_t channels) {
  if (half.rows() != channels / 2 + 1)
    throw InvalidArgument("expand_hermitian: row count does not match channels");
  ComplexMatrix full(channels, half.cols());
  for (std::size_t n = 0; n < half.cols(); ++n) {
    auto src = half.col(n);
    auto dst = full.col(n);
    for (std::size_t m = 0; m < src.size(); ++m) dst[m] = src[m];
    for (std::size_t m = src.size(); m < channels; ++m)
      dst[m] = std::conj(src[channels - m]);
  }
  return full;
}

RealVector hermitian_row_weights(std::size_t channels) {
  const std::size_t H = channels / 2 + 1;
  RealVector w(H, 2.0);
  w[0] = 1.0;
  if (channels % 2 == 0) w[H - 1] = 1.0;
  return w;
}

struct FrameOperator::Impl {
  explicit Impl(std::size_t channels) : fft(channels) {}
  detail::RealFft fft;
};

FrameOperator::FrameOperator(const StftConfig &cfg, Window window)
    : cfg_(cfg), window_(std::move(window)) {
  cfg_.validate();
  if (window_.size() != cfg_.window_len)
    throw InvalidArgument("window length does not match STFT configuration");
  weights_ = hermitian_row_weights(cfg_.channels);
  impl_ = std::make_unique<Impl>(cfg_.channels);
}

FrameOperator::~FrameOperator() = default;
FrameOperator::FrameOperator(FrameOperator &&) noexcept = default;
FrameOperator &FrameOperator::operator=(FrameOperator &&) noexcept = default;

// The frequency-invariant phase factor exp(-i 2 pi m a n / M) of frame n is
// applied as a circular shift of the frame by (a n mod M) samples inside the
// FFT buffer, so no per-bin multiplication is needed.
void FrameOperator::analyze_half(std::span<const double> x,
                                 ComplexMatrix &out) const {
  const std::size_t L = cfg_.signal_len, M = cfg_.channels, a = cfg_.hop,
                    W = cfg_.window_len, N = cfg_.frames(), H = half_rows();
  if (x.size() != L)
    throw InvalidArgument("analyze: signal length " + std::to_string(x.size()) +
                          " does not match configured " + std::to_string(L));
  if (out.rows() != H || out.cols() != N) out = ComplexMatrix(H, N);

  detail::RealBuffer in = detail::alloc_real(M);
  detail::ComplexBuffer spec = detail::alloc_complex(H);
  const double *g = window_.samples.data();
  double *buf = in.get();

  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t start = a * n;
    const std::size_t shift = start % M;
    const std::size_t head = std::min(W, M - shift);
    if (W < M) std::fill(buf, buf + M, 0.0);
    if (start + W <= L) {
      const double *xs = x.data() + start;
      for (std::size_t k = 0; k < head; ++k) buf[shift + k] = xs[k] * g[k];
      for (std::size_t k = head; k < W; ++k) buf[k - head] = xs[k] * g[k];
    } else {
      for (std::size_t k = 0; k < W; ++k) {
        const std::size_t pos = k < head ? shift + k : k - head;
        buf[pos] = x[(start + k) % L] * g[k];
      }
    }

    auto col = out.col(n);
    if (detail::plan_compatible(col.data())) {
      impl_->fft.forward(buf, reinterpret_cast<fftw_complex *>(col.data()));
    } else {
      impl_->fft.forward(buf, spec.get());
      for (std::size_t m = 0; m < H; ++m) col[m] = Complex(spec[m][0], spec[m][1]);
    }
  }
}

void FrameOperator::synthesize_half(const ComplexMatrix &half,
                                    RealVector &out) const {
  const std::size_t L = cfg_.signal_len, M = cfg_.channels, a = cfg_.hop,
                    W = cfg_.window_len, N = cfg_.frames(), H = half_rows();
  if (half.rows() != H || half.cols() != N)
    throw InvalidArgument("synthesize: spectrogram shape does not match configuration");
  out.assign(L, 0.0);

  detail::RealBuffer frame = detail::alloc_real(M);
  detail::ComplexBuffer spec = detail::alloc_complex(H);
  const double *g = window_.samples.data();
  const double *buf = frame.get();

  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t start = a * n;
    const std::size_t shift = start % M;
    const std::size_t head = std::min(W, M - shift);
    auto col = half.col(n);
    std::copy(col.begin(), col.end(), reinterpret_cast<Complex *>(spec.get()));
    impl_->fft.inverse(spec.get(), frame.get());
    if (start + W <= L) {
      double *os = out.data() + start;
      for (std::size_t k = 0; k < head; ++k) os[k] += buf[shift + k] * g[k];
      for (std::size_t k = head; k < W; ++k) os[k] += buf[k - head] * g[k];
    } else {
      for (std::size_t k = 0; k < W; ++k) {
        const std::size_t pos = k < head ? shift + k : k - head;
        out[(start + k) % L] += buf[pos] * g[k];
      }
    }
  }
}

ComplexMatrix FrameOperator::analyze_half(std::span<const double> x) const {
  ComplexMatrix out;
  analyze_half(x, out);
  return out;
}

RealVector FrameOperator::synthesize_half(const ComplexMatrix &half) const {
  RealVector out;
  synthesize_half(half, out);
  return out;
}

double FrameOperator::inner_real(const ComplexMatrix &a,
                                 const ComplexMatrix &b) const {
  double s = 0.0;
  for (std::size_t n = 0; n < a.cols(); ++n) {
    auto ca = a.col(n);
    auto cb = b.col(n);
    for (std::size_t m = 0; m < ca.size(); ++m)
      s += weights_[m] * (ca[m].real() * cb[m].real() + ca[m].imag() * cb[m].imag());
  }
  return s;
}

double FrameOperator::frobenius_norm(const ComplexMatrix &a) const {
  return std::sqrt(inner_real(a, a));
}

double FrameOperator::l1_norm(const ComplexMatrix &a) const {
  double s = 0.0;
  for (std::size_t n = 0; n < a.cols(); ++n) {
    auto ca = a.col(n);
    for (std::size_t m = 0; m < ca.size(); ++m) s += weights_[m] * fast_abs(ca[m]);
  }
  return s;
}

Spectrogram analyze(std::span<const double> x, const Window &g,
                    const StftConfig &cfg) {
  FrameOperator op(cfg, g);
  return {cfg, expand_hermitian(op.analyze_half(x), cfg.channels)};
}

namespace {

void check_shape(const Spectrogram &X, const StftConfig &cfg) {
  if (X.rows() != cfg.channels || X.cols() != cfg.frames())
    throw InvalidArgument("synthesize: spectrogram is " + std::to_string(X.rows()) +
                          "x" + std::to_string(X.cols()) + ", configuration expects " +
                          std::to_string(cfg.channels) + "x" +
                          std::to_string(cfg.frames()));
}

}  // namespace

RealVector synthesize_real_part(const Spectrogram &X, const Window &g,
                                const StftConfig &cfg) {
  FrameOperator op(cfg, g);
  check_shape(X, cfg);
  return op.synthesize_half(fold_hermitian(X.data));
}

RealVector synthesize(const Spectrogram &X, const Window &g,
                      const StftConfig &cfg) {
  FrameOperator op(cfg, g);
  check_shape(X, cfg);

  // The imaginary part of the full synthesis is the synthesis of the
  // anti-Hermitian part, whose norm bounds it (||syn|| <= 1 for tight
  // windows). Only compute it exactly when the bound is inconclusive.
  const std::size_t M = cfg.channels;
  double asym = 0.0;
  for (std::size_t n = 0; n < X.cols(); ++n) {
    auto col = X.data.col(n);
    for (std::size_t m = 0; m < M; ++m) {
      const std::size_t mirror = (M - m) % M;
      asym += std::norm(0.5 * (col[m] - std::conj(col[mirror])));
    }
  }
  const double tol = 1e-10 * frobenius_norm(X.data);
  if (std::sqrt(asym) > tol) {
    ComplexMatrix rotated = X.data;
    for (Complex &z : rotated.values()) z *= Complex(0.0, -1.0);
    const RealVector imag = op.synthesize_half(fold_hermitian(rotated));
    const double residue = norm2(imag);
    if (residue > tol)
      throw InvalidArgument("synthesize: imaginary residue " + std::to_string(residue) +
                            " exceeds tolerance; spectrogram is not conjugate-symmetric");
  }
  return op.synthesize_half(fold_hermitian(X.data));
}

}  // namespace tfpaint
