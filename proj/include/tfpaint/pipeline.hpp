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

#ifndef TFPAINT_PIPELINE_HPP_
#define TFPAINT_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tfpaint/mask.hpp"
#include "tfpaint/solver.hpp"
#include "tfpaint/stft.hpp"

namespace tfpaint {

// Inclusive range of consecutive missing columns.
struct GapRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first + 1; }
  bool operator==(const GapRange &) const = default;
};

enum class MaskPlacement { kPerSecondCenter, kSeededRandom };

// Number of columns kept for a signal of the given duration: whole hops,
// truncated to a multiple of the segment alignment unit.
std::size_t usable_columns(double duration_s, double sample_rate, const StftConfig &cfg);

// One run of `gap_cols` missing columns per whole second. `pad` reliable
// columns must fit on both sides of each run inside its second; pad = 0
// selects window_len / hop.
ColumnMask make_mask(double duration_s, double sample_rate, const StftConfig &cfg,
                     std::size_t gap_cols, MaskPlacement placement,
                     std::uint64_t seed = 0, std::size_t pad = 0);

// Time-domain samples influenced by a run of gap_cols missing columns.
std::size_t affected_span(std::size_t gap_cols, const StftConfig &cfg);

// Zeroes the masked columns.
Spectrogram apply_mask(const Spectrogram &X, const ColumnMask &mask);

// Maximal runs of missing columns in ascending order.
std::vector<GapRange> find_gaps(const ColumnMask &mask);

// Segment starts and lengths are multiples of this many columns, which keeps
// the segment's phase convention identical to the full spectrogram's.
std::size_t segment_alignment(const StftConfig &cfg);

struct GapSegment {
  GapRange gap;
  std::size_t start = 0;   // first column of the segment
  std::size_t length = 0;  // columns
  double peak = 1.0;
  // Missing columns re-indexed to the segment. Includes other gaps that fall
  // inside the segment.
  ColumnMask local_mask;
};

struct ExtractedSegment {
  GapSegment info;
  Spectrogram spectrogram;  // not normalized
};

// Smallest aligned [start, start + length) with pad columns on both sides of
// the gap. Throws ContextError when it does not fit in n_cols columns.
GapSegment plan_segment(const GapRange &gap, std::size_t pad, std::size_t n_cols,
                        const StftConfig &cfg);

// Cuts the segment for `gap` out of X_corr. When `mask` is given, its other
// missing columns inside the segment are marked missing too.
ExtractedSegment extract_segment(const Spectrogram &X_corr, const GapRange &gap,
                                 std::size_t pad, const ColumnMask *mask = nullptr);

struct NormalizedSegment {
  Spectrogram spectrogram;
  double peak = 1.0;
};

// Divides by the peak of |syn(X)|. A silent segment is returned unchanged
// with peak 1.
NormalizedSegment peak_normalize(const Spectrogram &X);
Spectrogram denormalize(const Spectrogram &X, double peak);

enum class Method { kUphain, kBphain, kBphainOracle, kTfOnly };

std::string to_string(Method method);
// Accepts "uphain", "bphain", "bphain_oracle" and "tf_only", with either
// underscores or hyphens.
Method parse_method(const std::string &name);

struct InpaintOptions {
  Method method = Method::kUphain;
  SolverConfig solver;
  std::size_t pad = 0;  // 0 selects window_len / hop
  std::size_t jobs = 1;
  // Ground-truth spectrogram for Method::kBphainOracle.
  const Spectrogram *reference = nullptr;
};

struct GapReport {
  GapSegment segment;
  std::size_t outer_iters_used = 0;
  bool early_stopped = false;
  double runtime_s = 0.0;
};

struct InpaintResult {
  Spectrogram output;
  std::vector<GapReport> gaps;
};

// Called with the index of the gap being solved. Calls are serialized.
using GapTraceFn = std::function<void(std::size_t gap, const TraceEntry &)>;

// Solves every gap on its own segment and writes the de-normalized gap
// columns back; every other column is X_corr's, bit-exact. Results do not
// depend on `jobs`. Errors from a gap are rethrown with the gap's columns in
// the message (the lowest-numbered failing gap wins).
InpaintResult inpaint_spectrogram(const Spectrogram &X_corr, const ColumnMask &mask,
                                  const InpaintOptions &options,
                                  const GapTraceFn &trace = {});

}  // namespace tfpaint

#endif  // TFPAINT_PIPELINE_HPP_
