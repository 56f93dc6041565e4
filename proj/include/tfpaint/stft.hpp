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

#ifndef TFPAINT_STFT_HPP_
#define TFPAINT_STFT_HPP_

#include <cstddef>
#include <memory>
#include <span>

#include "tfpaint/matrix.hpp"

namespace tfpaint {

// Frame geometry of a discrete Gabor transform on a circular signal.
//
// Frame n covers samples [n*hop, n*hop + window_len) modulo signal_len, and
// each frame is transformed with a DFT of length `channels`. The transform
// uses the frequency-invariant phase convention: the complex exponential is
// referenced to the absolute sample index, not the frame start.
struct StftConfig {
  std::size_t window_len = 2048;
  std::size_t hop = 512;
  std::size_t channels = 2048;
  std::size_t signal_len = 0;

  std::size_t frames() const { return hop == 0 ? 0 : signal_len / hop; }
  // Columns per window length; segments must be aligned to this.
  std::size_t frame_ratio() const { return hop == 0 ? 0 : window_len / hop; }
  // Number of non-negative frequency rows of a real signal's spectrogram.
  std::size_t half_rows() const { return channels / 2 + 1; }

  // Throws InvalidArgument unless hop | signal_len, hop <= window_len <=
  // channels and window_len <= signal_len.
  void validate() const;
  // The checks that do not involve signal_len.
  void validate_geometry() const;

  // 2048-sample window, 75 % overlap, 2048 channels.
  static StftConfig defaults(std::size_t signal_len);

  bool operator==(const StftConfig &) const = default;
};

enum class WindowKind { kHann, kHannDerivative, kCustom };

struct Window {
  RealVector samples;
  WindowKind kind = WindowKind::kCustom;

  std::size_t size() const { return samples.size(); }
  double operator[](std::size_t k) const { return samples[k]; }
};

// Periodic (DFT-even) Hann: w[k] = 0.5 (1 - cos(2 pi k / n)).
Window make_hann(std::size_t window_len);

// Derivative of the continuous periodic Hann sampled at integer points, in
// units of per-sample: w'[k] = (pi / n) sin(2 pi k / n).
Window make_hann_derivative(std::size_t window_len);

// Canonical tight window g[k] / sqrt(M * sum_j g[k - j*hop]^2). Analysis and
// synthesis with the result form a Parseval tight frame. Throws
// DegenerateWindow when some diagonal entry of the frame operator is not
// positive.
Window tight_window(const Window &g, const StftConfig &cfg);

// Scales `companion` sample-by-sample with the normalization that
// tight_window() applies to `g`. Used to keep a derivative window consistent
// with its tight base window.
Window tight_companion(const Window &g, const Window &companion,
                       const StftConfig &cfg);

struct Spectrogram {
  StftConfig config;
  ComplexMatrix data;  // channels x frames

  static Spectrogram zeros(const StftConfig &cfg) {
    return {cfg, ComplexMatrix(cfg.channels, cfg.frames())};
  }
  std::size_t rows() const { return data.rows(); }
  std::size_t cols() const { return data.cols(); }
  Complex &operator()(std::size_t m, std::size_t n) { return data(m, n); }
  const Complex &operator()(std::size_t m, std::size_t n) const {
    return data(m, n);
  }
};

// X[m,n] = sum_l x[l] g[l - a n] exp(-i 2 pi m l / M).
Spectrogram analyze(std::span<const double> x, const Window &g,
                    const StftConfig &cfg);

// Real part of sum_m sum_n X[m,n] g[l - a n] exp(+i 2 pi m l / M). Throws
// InvalidArgument when the discarded imaginary part exceeds 1e-10 relative to
// ||X||_F, which only happens for spectrograms without conjugate symmetry.
RealVector synthesize(const Spectrogram &X, const Window &g,
                      const StftConfig &cfg);

// Same real part without the symmetry check. This is the exact adjoint of
// analyze() under the real inner product Re <X, Y>.
RealVector synthesize_real_part(const Spectrogram &X, const Window &g,
                                const StftConfig &cfg);

// Hermitian-symmetric spectrograms are fully described by their rows
// 0..M/2. These convert between that half representation and the full one.
ComplexMatrix fold_hermitian(const ComplexMatrix &full);
ComplexMatrix expand_hermitian(const ComplexMatrix &half, std::size_t channels);
// Weight of each half row in full-matrix sums: 1 for DC (and Nyquist when M
// is even), 2 for the rest.
RealVector hermitian_row_weights(std::size_t channels);

// Analysis/synthesis bound to one geometry and window, operating on the half
// (non-negative frequency) representation. Thread-safe: all scratch memory is
// per call.
class FrameOperator {
 public:
  FrameOperator(const StftConfig &cfg, Window window);
  ~FrameOperator();
  FrameOperator(FrameOperator &&) noexcept;
  FrameOperator &operator=(FrameOperator &&) noexcept;

  const StftConfig &config() const { return cfg_; }
  const Window &window() const { return window_; }
  std::size_t half_rows() const { return cfg_.half_rows(); }
  std::span<const double> row_weights() const { return weights_; }

  // out is resized to half_rows x frames.
  void analyze_half(std::span<const double> x, ComplexMatrix &out) const;
  // Treats `half` as the non-negative half of a Hermitian spectrogram; the
  // imaginary parts of the DC and Nyquist rows are ignored.
  void synthesize_half(const ComplexMatrix &half, RealVector &out) const;

  ComplexMatrix analyze_half(std::span<const double> x) const;
  RealVector synthesize_half(const ComplexMatrix &half) const;

  // Weighted sums giving the full-matrix quantity from half matrices.
  double inner_real(const ComplexMatrix &a, const ComplexMatrix &b) const;
  double frobenius_norm(const ComplexMatrix &a) const;
  double l1_norm(const ComplexMatrix &a) const;

 private:
  struct Impl;
  StftConfig cfg_;
  Window window_;
  RealVector weights_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace tfpaint

#endif  // TFPAINT_STFT_HPP_
