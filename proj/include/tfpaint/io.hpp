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

#ifndef TFPAINT_IO_HPP_
#define TFPAINT_IO_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "tfpaint/eval.hpp"
#include "tfpaint/mask.hpp"
#include "tfpaint/matrix.hpp"
#include "tfpaint/solver.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint {

struct WavData {
  RealVector samples;  // in [-1, 1)
  unsigned sample_rate = 16000;
};

// 16-bit PCM mono only. Samples are s / 32768.
WavData read_wav(const std::string &path);

// Samples are rounded to the nearest 16-bit level and clipped to
// [-32768, 32767]; values in range move by at most half a level.
void write_wav(const std::string &path, const WavData &wav);

struct MaskFile {
  ColumnMask mask;
  std::size_t hop = 512;
};

// {"n_cols": int, "hop": int, "zero_cols": [int, ...]}
MaskFile read_mask(const std::string &path);
void write_mask(const std::string &path, const MaskFile &mask);

// "SPGM1", little-endian u32 M, N, hop, window_len, then M x N pairs of
// little-endian f64 (real, imag), row by row. channels = M and
// signal_len = N * hop on reading.
Spectrogram read_spectrogram(const std::string &path);
void write_spectrogram(const std::string &path, const Spectrogram &X);

// CSV header: method,gap_cols,signal,snr_db,runtime_s,lambda. An infinite
// SNR is written as "inf" in CSV and null in JSON.
void write_results_csv(const std::string &path, const std::vector<EvalRecord> &records);
void write_results_json(const std::string &path, const std::vector<EvalRecord> &records);

// Per-iteration solver trace rows: gap,outer,inner,objective,feasibility_residual.
class TraceWriter {
 public:
  explicit TraceWriter(const std::string &path);
  ~TraceWriter();
  TraceWriter(const TraceWriter &) = delete;
  TraceWriter &operator=(const TraceWriter &) = delete;

  void write(std::size_t gap, const TraceEntry &e);

 private:
  struct Impl;
  Impl *impl_;
};

bool file_exists(const std::string &path);

}  // namespace tfpaint

#endif  // TFPAINT_IO_HPP_
