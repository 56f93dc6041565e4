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

#include "tfpaint/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "tfpaint/errors.hpp"
#include "tfpaint/phase_prior.hpp"

namespace tfpaint {

namespace {

std::string describe(const GapRange &gap) {
  return "gap at columns " + std::to_string(gap.first) + ".." + std::to_string(gap.last);
}

std::size_t resolve_pad(std::size_t pad, const StftConfig &cfg) {
  return pad == 0 ? std::max<std::size_t>(cfg.frame_ratio(), 1) : pad;
}

}  // namespace

std::size_t segment_alignment(const StftConfig &cfg) {
  cfg.validate_geometry();
  const std::size_t r = std::max<std::size_t>(cfg.frame_ratio(), 1);
  std::size_t unit = r;
  while ((unit * cfg.hop) % cfg.channels != 0) unit += r;
  return unit;
}

std::size_t usable_columns(double duration_s, double sample_rate, const StftConfig &cfg) {
  if (!(duration_s > 0.0) || !(sample_rate > 0.0))
    throw InvalidArgument("duration and sample rate must be positive");
  const auto samples = static_cast<std::size_t>(std::floor(duration_s * sample_rate + 1e-9));
  const std::size_t n = samples / cfg.hop;
  return n - n % segment_alignment(cfg);
}

ColumnMask make_mask(double duration_s, double sample_rate, const StftConfig &cfg,
                     std::size_t gap_cols, MaskPlacement placement, std::uint64_t seed,
                     std::size_t pad) {
  if (duration_s < 1.0) throw InvalidArgument("make_mask: duration must be at least 1 s");
  if (gap_cols == 0) throw InvalidArgument("make_mask: gap_cols must be positive");
  pad = resolve_pad(pad, cfg);
  const std::size_t n = usable_columns(duration_s, sample_rate, cfg);
  const double per_second = sample_rate / static_cast<double>(cfg.hop);
  const auto seconds = static_cast<std::size_t>(std::floor(duration_s + 1e-9));
  std::mt19937_64 rng(seed);

  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < seconds; ++k) {
    const auto c0 = static_cast<long long>(std::ceil(double(k) * per_second - 1e-9));
    const auto c1 = std::min(static_cast<long long>(std::floor(double(k + 1) * per_second + 1e-9)),
                             static_cast<long long>(n));
    const long long lo = c0 + static_cast<long long>(pad);
    const long long hi = c1 - static_cast<long long>(pad + gap_cols);
    if (hi < lo)
      throw InvalidArgument("make_mask: a gap of " + std::to_string(gap_cols) +
                            " columns with " + std::to_string(pad) +
                            " context columns per side does not fit in second " +
                            std::to_string(k));
    long long start;
    if (placement == MaskPlacement::kPerSecondCenter) {
      // Run whose middle is nearest to the middle of the second.
      start = std::llround((double(k) + 0.5) * per_second - double(gap_cols - 1) / 2.0);
      start = std::clamp(start, lo, hi);
    } else {
      start = std::uniform_int_distribution<long long>(lo, hi)(rng);
    }
    for (std::size_t j = 0; j < gap_cols; ++j) cols.push_back(static_cast<std::size_t>(start) + j);
  }
  return ColumnMask::make(n, std::move(cols));
}

std::size_t affected_span(std::size_t gap_cols, const StftConfig &cfg) {
  if (gap_cols == 0) return 0;
  return (gap_cols - 1) * cfg.hop + cfg.window_len;
}

Spectrogram apply_mask(const Spectrogram &X, const ColumnMask &mask) {
  mask.validate();
  if (mask.n_cols != X.cols())
    throw InvalidArgument("apply_mask: mask has " + std::to_string(mask.n_cols) +
                          " columns, spectrogram has " + std::to_string(X.cols()));
  Spectrogram out = X;
  for (std::size_t n : mask.zero_cols) {
    auto c = out.data.col(n);
    std::fill(c.begin(), c.end(), Complex{});
  }
  return out;
}

std::vector<GapRange> find_gaps(const ColumnMask &mask) {
  std::vector<GapRange> gaps;
  for (std::size_t n : mask.zero_cols) {
    if (!gaps.empty() && gaps.back().last + 1 == n)
      gaps.back().last = n;
    else
      gaps.push_back({n, n});
  }
  return gaps;
}

GapSegment plan_segment(const GapRange &gap, std::size_t pad, std::size_t n_cols,
                        const StftConfig &cfg) {
  if (pad == 0) throw InvalidArgument("plan_segment: pad must be positive");
  if (gap.last < gap.first) throw InvalidArgument("plan_segment: empty gap");
  const std::size_t u = segment_alignment(cfg);
  if (gap.first < pad)
    throw ContextError(describe(gap) + ": fewer than " + std::to_string(pad) +
                       " columns before the gap");
  const std::size_t start = (gap.first - pad) / u * u;
  const std::size_t need_end = gap.last + pad + 1;
  const std::size_t length = (need_end - start + u - 1) / u * u;
  if (start + length > n_cols)
    throw ContextError(describe(gap) + ": segment [" + std::to_string(start) + ", " +
                       std::to_string(start + length) + ") runs past the last column " +
                       std::to_string(n_cols));
  GapSegment seg;
  seg.gap = gap;
  seg.start = start;
  seg.length = length;
  std::vector<std::size_t> local;
  for (std::size_t n = gap.first; n <= gap.last; ++n) local.push_back(n - start);
  seg.local_mask = ColumnMask::make(length, std::move(local));
  return seg;
}

ExtractedSegment extract_segment(const Spectrogram &X_corr, const GapRange &gap,
                                 std::size_t pad, const ColumnMask *mask) {
  const StftConfig &cfg = X_corr.config;
  if (X_corr.rows() != cfg.channels || X_corr.cols() != cfg.frames())
    throw InvalidArgument("extract_segment: spectrogram shape does not match its configuration");
  GapSegment seg = plan_segment(gap, pad, X_corr.cols(), cfg);
  if (mask != nullptr) {
    if (mask->n_cols != X_corr.cols())
      throw InvalidArgument("extract_segment: mask does not match spectrogram width");
    std::vector<std::size_t> local = seg.local_mask.zero_cols;
    for (std::size_t n : mask->zero_cols)
      if (n >= seg.start && n < seg.start + seg.length) local.push_back(n - seg.start);
    seg.local_mask = ColumnMask::make(seg.length, std::move(local));
  }

  StftConfig scfg = cfg;
  scfg.signal_len = seg.length * cfg.hop;
  Spectrogram S = Spectrogram::zeros(scfg);
  for (std::size_t j = 0; j < seg.length; ++j) {
    auto src = X_corr.data.col(seg.start + j);
    std::copy(src.begin(), src.end(), S.data.col(j).begin());
  }
  return {std::move(seg), std::move(S)};
}

NormalizedSegment peak_normalize(const Spectrogram &X) {
  const AnalysisWindows w = AnalysisWindows::tight_hann(X.config);
  const RealVector y = synthesize(X, w.g, X.config);
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) return {X, 1.0};
  Spectrogram out = X;
  for (Complex &z : out.data.values()) z /= peak;
  return {std::move(out), peak};
}

Spectrogram denormalize(const Spectrogram &X, double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak))
    throw InvalidArgument("denormalize: peak must be positive and finite");
  Spectrogram out = X;
  for (Complex &z : out.data.values()) z *= peak;
  return out;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kUphain: return "uphain";
    case Method::kBphain: return "bphain";
    case Method::kBphainOracle: return "bphain_oracle";
    case Method::kTfOnly: return "tf_only";
  }
  return "unknown";
}

Method parse_method(const std::string &name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  for (Method m : {Method::kUphain, Method::kBphain, Method::kBphainOracle, Method::kTfOnly})
    if (to_string(m) == key) return m;
  throw InvalidArgument("unknown method '" + name +
                        "' (expected uphain, bphain, bphain_oracle or tf_only)");
}

namespace {

struct GapOutcome {
  GapReport report;
  Spectrogram solved;  // de-normalized segment
};

GapOutcome solve_gap(const Spectrogram &X_corr, const ColumnMask &mask,
                     const GapSegment &plan, const InpaintOptions &opt,
                     const TraceFn &trace) {
  const auto t0 = std::chrono::steady_clock::now();
  ExtractedSegment ex = extract_segment(X_corr, plan.gap, opt.pad, &mask);
  NormalizedSegment norm = peak_normalize(ex.spectrogram);
  ex.info.peak = norm.peak;
  const ColumnMask &local = ex.info.local_mask;

  SolveResult r;
  switch (opt.method) {
    case Method::kUphain:
      r = uphain_tf(norm.spectrogram, local, opt.solver, trace);
      break;
    case Method::kBphain:
      r = bphain_tf(norm.spectrogram, local, opt.solver, {}, trace);
      break;
    case Method::kBphainOracle: {
      ExtractedSegment ref = extract_segment(*opt.reference, plan.gap, opt.pad);
      for (Complex &z : ref.spectrogram.data.values()) z /= norm.peak;
      const AnalysisWindows w = AnalysisWindows::tight_hann(ref.spectrogram.config);
      const RealVector oracle = synthesize(ref.spectrogram, w.g, ref.spectrogram.config);
      r = bphain_tf(norm.spectrogram, local, opt.solver, oracle, trace);
      break;
    }
    case Method::kTfOnly:
      r = cpa_tf_only(norm.spectrogram, local, opt.solver, trace);
      break;
  }

  GapOutcome out;
  out.solved = denormalize(r.output, norm.peak);
  out.report.segment = std::move(ex.info);
  out.report.outer_iters_used = r.outer_iters_used;
  out.report.early_stopped = r.early_stopped;
  out.report.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

[[noreturn]] void rethrow_for_gap(std::exception_ptr ep, const GapRange &gap) {
  try {
    std::rethrow_exception(ep);
  } catch (const DivergenceError &e) {
    throw DivergenceError(describe(gap) + ": " + e.what(), e.iteration());
  } catch (const ContextError &e) {
    throw ContextError(describe(gap) + ": " + e.what());
  } catch (const InvalidArgument &e) {
    throw InvalidArgument(describe(gap) + ": " + e.what());
  }
}

}  // namespace

InpaintResult inpaint_spectrogram(const Spectrogram &X_corr, const ColumnMask &mask,
                                  const InpaintOptions &options, const GapTraceFn &trace) {
  const StftConfig &cfg = X_corr.config;
  cfg.validate();
  if (X_corr.rows() != cfg.channels || X_corr.cols() != cfg.frames())
    throw InvalidArgument("inpaint: spectrogram shape does not match its configuration");
  mask.validate();
  if (mask.n_cols != X_corr.cols())
    throw InvalidArgument("inpaint: mask has " + std::to_string(mask.n_cols) +
                          " columns, spectrogram has " + std::to_string(X_corr.cols()));
  if (options.jobs == 0) throw InvalidArgument("inpaint: jobs must be positive");
  options.solver.validate();
  if (options.method == Method::kBphainOracle) {
    if (options.reference == nullptr)
      throw InvalidArgument("inpaint: bphain_oracle needs a reference spectrogram");
    if (!options.reference->data.same_shape(X_corr.data) ||
        !(options.reference->config == cfg))
      throw InvalidArgument("inpaint: reference spectrogram does not match the input");
  }

  InpaintOptions opt = options;
  opt.pad = resolve_pad(options.pad, cfg);

  // Planning first reports context problems before any solving starts.
  const std::vector<GapRange> gaps = find_gaps(mask);
  std::vector<GapSegment> plans;
  for (const GapRange &g : gaps) plans.push_back(plan_segment(g, opt.pad, X_corr.cols(), cfg));

  std::vector<GapOutcome> outcomes(gaps.size());
  std::vector<std::exception_ptr> errors(gaps.size());
  std::mutex trace_mutex;
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < gaps.size(); i = next++) {
      TraceFn gap_trace;
      if (trace)
        gap_trace = [&, i](const TraceEntry &e) {
          std::lock_guard<std::mutex> lock(trace_mutex);
          trace(i, e);
        };
      try {
        outcomes[i] = solve_gap(X_corr, mask, plans[i], opt, gap_trace);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::min(opt.jobs, gaps.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread &t : pool) t.join();
  }
  for (std::size_t i = 0; i < gaps.size(); ++i)
    if (errors[i]) rethrow_for_gap(errors[i], gaps[i]);

  InpaintResult result{X_corr, {}};
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const GapSegment &seg = outcomes[i].report.segment;
    for (std::size_t n = gaps[i].first; n <= gaps[i].last; ++n) {
      auto src = outcomes[i].solved.data.col(n - seg.start);
      std::copy(src.begin(), src.end(), result.output.data.col(n).begin());
    }
    result.gaps.push_back(std::move(outcomes[i].report));
  }
  return result;
}

}  // namespace tfpaint
