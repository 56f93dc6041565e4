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

#ifndef TFPAINT_EVAL_HPP_
#define TFPAINT_EVAL_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tfpaint/mask.hpp"
#include "tfpaint/matrix.hpp"
#include "tfpaint/pipeline.hpp"

namespace tfpaint {

// Reported by snr() when the test signal equals the reference.
inline constexpr double kSnrInfinity = std::numeric_limits<double>::infinity();

// 10 log10(|ref|^2 / |ref - test|^2) in dB.
double snr(std::span<const double> ref, std::span<const double> test);

enum class SignalKind { kTone, kMultitone, kChirp, kNoise };

struct SignalSpec {
  SignalKind kind = SignalKind::kTone;
  // Tone frequency, or chirp start frequency, in Hz.
  double f0 = 440.0;
  // Chirp end frequency in Hz.
  double f1 = 440.0;
  double amplitude = 0.5;
  double phase = 0.0;
  // Multitone: number of components, drawn from `seed`.
  std::size_t tones = 3;
  std::uint64_t seed = 0;

  static SignalSpec tone(double freq_hz, double phase = 0.0);
  static SignalSpec multitone(std::size_t tones, std::uint64_t seed);
  static SignalSpec chirp(double f0, double f1, double phase = 0.0);
  static SignalSpec noise(std::uint64_t seed);
};

// Frequency of DFT bin `bin` offset by `delta` bins.
double bin_frequency(double bin, double delta, std::size_t channels, double sample_rate);

// floor(duration_s * sample_rate) samples. Throws InvalidArgument for
// frequencies at or above Nyquist and for non-positive durations or rates.
RealVector make_test_signal(const SignalSpec &spec, double duration_s, double sample_rate);

struct NamedSignal {
  std::string id;
  SignalKind kind = SignalKind::kTone;
  RealVector samples;
};

// 10 multitone, 10 chirp and 4 tone signals, truncated to whole columns of
// `cfg`'s geometry (79872 samples for 5 s at 16 kHz with the defaults).
std::vector<NamedSignal> synthetic_suite(std::uint64_t seed = 2024, double duration_s = 5.0,
                                         double sample_rate = 16000.0,
                                         const StftConfig &cfg = StftConfig{});

// Samples touched by at least one frame of a missing column.
std::vector<unsigned char> affected_samples(const ColumnMask &mask, const StftConfig &cfg);

struct EvalRecord {
  std::string method;
  std::size_t gap_cols = 0;
  std::string signal_id;
  double snr_db = 0.0;
  double runtime_s = 0.0;
  double lambda = 0.0;
  std::size_t iters_inner = 0;
  // Largest number of IF estimates used over the signal's gaps.
  std::size_t iters_outer_used = 0;
};

struct SignalOutcome {
  EvalRecord record;
  double baseline_snr_db = 0.0;  // zero-filled observation
  RealVector restored;
  Spectrogram restored_spectrogram;
  Spectrogram observed;
};

// Analyzes `x`, applies `mask`, inpaints and scores the synthesized result
// against `x`. x.size() must be mask.n_cols * hop.
SignalOutcome evaluate_signal(const NamedSignal &signal, const ColumnMask &mask,
                              const InpaintOptions &options,
                              const StftConfig &stft = StftConfig{});

struct LambdaMean {
  double lambda = 0.0;
  double mean_snr_db = 0.0;
};

struct SweepResult {
  std::vector<EvalRecord> records;
  std::vector<LambdaMean> means;  // in grid order
};

// Ten decades from 1e-7 to 1e2.
std::vector<double> default_lambda_grid();

// Per-second-center masks with gap_cols columns per gap.
SweepResult sweep_lambda(const std::vector<NamedSignal> &signals, std::size_t gap_cols,
                         const std::vector<double> &grid, const InpaintOptions &options,
                         const StftConfig &stft = StftConfig{}, double sample_rate = 16000.0);

struct SummaryRow {
  std::string method;
  std::size_t gap_cols = 0;
  double mean_snr_db = 0.0;
  std::size_t count = 0;
};

struct CompareResult {
  std::vector<EvalRecord> records;
  std::vector<SummaryRow> summary;  // method-major, gap lengths ascending
};

// Runs every method on every signal for each gap length. Oracle runs use the
// clean spectrogram as reference.
CompareResult compare_methods(const std::vector<NamedSignal> &signals,
                              const std::vector<std::size_t> &gap_cols,
                              const std::vector<Method> &methods,
                              const InpaintOptions &options,
                              const StftConfig &stft = StftConfig{},
                              double sample_rate = 16000.0);

// Mean SNR of the records matching `method` (all methods when empty) and,
// when nonzero, `gap_cols`.
double mean_snr(const std::vector<EvalRecord> &records, const std::string &method = {},
                std::size_t gap_cols = 0);

}  // namespace tfpaint

#endif  // TFPAINT_EVAL_HPP_
