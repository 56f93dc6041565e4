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

#include "tfpaint/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tfpaint/errors.hpp"
#include "tfpaint/phase_prior.hpp"

namespace tfpaint {

double snr(std::span<const double> ref, std::span<const double> test) {
  if (ref.size() != test.size())
    throw InvalidArgument("snr: reference has " + std::to_string(ref.size()) +
                          " samples, test has " + std::to_string(test.size()));
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    signal += ref[i] * ref[i];
    const double e = ref[i] - test[i];
    noise += e * e;
  }
  if (signal == 0.0) throw InvalidArgument("snr: reference signal is zero");
  if (noise == 0.0) return kSnrInfinity;
  return 10.0 * std::log10(signal / noise);
}

SignalSpec SignalSpec::tone(double freq_hz, double phase) {
  SignalSpec s;
  s.kind = SignalKind::kTone;
  s.f0 = s.f1 = freq_hz;
  s.phase = phase;
  return s;
}

SignalSpec SignalSpec::multitone(std::size_t tones, std::uint64_t seed) {
  SignalSpec s;
  s.kind = SignalKind::kMultitone;
  s.tones = tones;
  s.seed = seed;
  return s;
}

SignalSpec SignalSpec::chirp(double f0, double f1, double phase) {
  SignalSpec s;
  s.kind = SignalKind::kChirp;
  s.f0 = f0;
  s.f1 = f1;
  s.phase = phase;
  return s;
}

SignalSpec SignalSpec::noise(std::uint64_t seed) {
  SignalSpec s;
  s.kind = SignalKind::kNoise;
  s.seed = seed;
  return s;
}

double bin_frequency(double bin, double delta, std::size_t channels, double sample_rate) {
  return (bin + delta) * sample_rate / static_cast<double>(channels);
}

namespace {

// amplitude cos(2 pi (f0 t + (f1 - f0) t^2 / (2 T)) + phase), t = l / sr.
void add_sweep(RealVector &x, double f0, double f1, double amplitude, double phase,
               double sample_rate) {
  const double T = static_cast<double>(x.size()) / sample_rate;
  const double rate = (f1 - f0) / (2.0 * T);
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double t = static_cast<double>(l) / sample_rate;
    x[l] += amplitude * std::cos(2.0 * std::numbers::pi * (f0 * t + rate * t * t) + phase);
  }
}

void check_frequency(double f, double sample_rate) {
  if (!(f >= 0.0) || !(f < sample_rate / 2.0))
    throw InvalidArgument("test signal: frequency " + std::to_string(f) +
                          " Hz is outside [0, Nyquist)");
}

}  // namespace

RealVector make_test_signal(const SignalSpec &spec, double duration_s, double sample_rate) {
  if (!(duration_s > 0.0) || !(sample_rate > 0.0))
    throw InvalidArgument("test signal: duration and sample rate must be positive");
  RealVector x(static_cast<std::size_t>(std::floor(duration_s * sample_rate + 1e-9)), 0.0);
  switch (spec.kind) {
    case SignalKind::kTone:
      check_frequency(spec.f0, sample_rate);
      add_sweep(x, spec.f0, spec.f0, spec.amplitude, spec.phase, sample_rate);
      break;
    case SignalKind::kChirp:
      check_frequency(spec.f0, sample_rate);
      check_frequency(spec.f1, sample_rate);
      add_sweep(x, spec.f0, spec.f1, spec.amplitude, spec.phase, sample_rate);
      break;
    case SignalKind::kMultitone: {
      if (spec.tones == 0) throw InvalidArgument("test signal: multitone needs tones >= 1");
      std::mt19937_64 rng(spec.seed);
      const double top = std::min(4000.0, 0.45 * sample_rate);
      std::uniform_real_distribution<double> freq(100.0, top), amp(0.2, 1.0),
          ph(0.0, 2.0 * std::numbers::pi);
      for (std::size_t k = 0; k < spec.tones; ++k) {
        const double f = freq(rng);
        const double a = amp(rng) * spec.amplitude / static_cast<double>(spec.tones);
        const double p = ph(rng);
        add_sweep(x, f, f, a, p, sample_rate);
      }
      break;
    }
    case SignalKind::kNoise: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> dist(0.0, spec.amplitude);
      for (double &v : x) v = dist(rng);
      break;
    }
  }
  return x;
}

std::vector<NamedSignal> synthetic_suite(std::uint64_t seed, double duration_s,
                                         double sample_rate, const StftConfig &cfg) {
  const std::size_t len = usable_columns(duration_s, sample_rate, cfg) * cfg.hop;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<NamedSignal> suite;

  auto add = [&](std::string id, SignalKind kind, RealVector x) {
    x.resize(len);
    suite.push_back({std::move(id), kind, std::move(x)});
  };
  for (int i = 0; i < 10; ++i) {
    const SignalSpec spec = SignalSpec::multitone(3, rng());
    add("multitone" + std::to_string(i), SignalKind::kMultitone,
        make_test_signal(spec, duration_s, sample_rate));
  }
  for (int i = 0; i < 10; ++i) {
    const double f0 = 200.0 + 1800.0 * u01(rng);
    const double f1 = 200.0 + 3000.0 * u01(rng);
    const double phase = 2.0 * std::numbers::pi * u01(rng);
    add("chirp" + std::to_string(i), SignalKind::kChirp,
        make_test_signal(SignalSpec::chirp(f0, f1, phase), duration_s, sample_rate));
  }
  const double bins[4] = {57.0, 113.0, 200.0, 311.0};
  const double deltas[4] = {0.0, 0.25, -0.4, 0.5};
  for (int i = 0; i < 4; ++i) {
    const double f = bin_frequency(bins[i], deltas[i], cfg.channels, sample_rate);
    const double phase = 2.0 * std::numbers::pi * u01(rng);
    add("tone" + std::to_string(i), SignalKind::kTone,
        make_test_signal(SignalSpec::tone(f, phase), duration_s, sample_rate));
  }
  return suite;
}

std::vector<unsigned char> affected_samples(const ColumnMask &mask, const StftConfig &cfg) {
  cfg.validate();
  if (mask.n_cols != cfg.frames())
    throw InvalidArgument("affected_samples: mask does not match the configuration");
  std::vector<unsigned char> hit(cfg.signal_len, 0);
  for (std::size_t n : mask.zero_cols)
    for (std::size_t k = 0; k < cfg.window_len; ++k)
      hit[(n * cfg.hop + k) % cfg.signal_len] = 1;
  return hit;
}

SignalOutcome evaluate_signal(const NamedSignal &signal, const ColumnMask &mask,
                              const InpaintOptions &options, const StftConfig &stft) {
  StftConfig cfg = stft;
  cfg.signal_len = signal.samples.size();
  cfg.validate();
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const Spectrogram X = analyze(signal.samples, w.g, cfg);

  SignalOutcome out;
  out.observed = apply_mask(X, mask);
  InpaintOptions opt = options;
  if (opt.method == Method::kBphainOracle) opt.reference = &X;
  const InpaintResult r = inpaint_spectrogram(out.observed, mask, opt);

  out.restored_spectrogram = r.output;
  out.restored = synthesize(r.output, w.g, cfg);
  out.baseline_snr_db = snr(signal.samples, synthesize(out.observed, w.g, cfg));

  EvalRecord &rec = out.record;
  rec.method = to_string(opt.method);
  rec.gap_cols = find_gaps(mask).empty() ? 0 : find_gaps(mask).front().size();
  rec.signal_id = signal.id;
  rec.snr_db = snr(signal.samples, out.restored);
  for (const GapReport &g : r.gaps) {
    rec.runtime_s += g.runtime_s;
    rec.iters_outer_used = std::max(rec.iters_outer_used, g.outer_iters_used);
  }
  rec.lambda = opt.solver.lambda;
  rec.iters_inner = opt.solver.inner_iters;
  return out;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid;
  for (int e = -7; e <= 2; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

namespace {

ColumnMask center_mask(const NamedSignal &s, std::size_t gap_cols, const StftConfig &stft,
                       double sample_rate) {
  const double duration = static_cast<double>(s.samples.size()) / sample_rate;
  const ColumnMask mask = make_mask(duration, sample_rate, stft, gap_cols,
                                    MaskPlacement::kPerSecondCenter);
  if (mask.n_cols * stft.hop != s.samples.size())
    throw InvalidArgument("signal " + s.id + " is not a whole number of aligned columns");
  return mask;
}

}  // namespace

SweepResult sweep_lambda(const std::vector<NamedSignal> &signals, std::size_t gap_cols,
                         const std::vector<double> &grid, const InpaintOptions &options,
                         const StftConfig &stft, double sample_rate) {
  if (grid.empty()) throw InvalidArgument("sweep_lambda: empty lambda grid");
  SweepResult out;
  for (double lambda : grid) {
    InpaintOptions opt = options;
    opt.solver.lambda = lambda;
    double sum = 0.0;
    for (const NamedSignal &s : signals) {
      const ColumnMask mask = center_mask(s, gap_cols, stft, sample_rate);
      out.records.push_back(evaluate_signal(s, mask, opt, stft).record);
      sum += out.records.back().snr_db;
    }
    out.means.push_back({lambda, signals.empty() ? 0.0 : sum / double(signals.size())});
  }
  return out;
}

CompareResult compare_methods(const std::vector<NamedSignal> &signals,
                              const std::vector<std::size_t> &gap_cols,
                              const std::vector<Method> &methods,
                              const InpaintOptions &options, const StftConfig &stft,
                              double sample_rate) {
  CompareResult out;
  for (Method method : methods) {
    InpaintOptions opt = options;
    opt.method = method;
    for (std::size_t g : gap_cols) {
      SummaryRow row{to_string(method), g, 0.0, 0};
      for (const NamedSignal &s : signals) {
        const ColumnMask mask = center_mask(s, g, stft, sample_rate);
        out.records.push_back(evaluate_signal(s, mask, opt, stft).record);
        row.mean_snr_db += out.records.back().snr_db;
        ++row.count;
      }
      if (row.count > 0) row.mean_snr_db /= double(row.count);
      out.summary.push_back(row);
    }
  }
  return out;
}

double mean_snr(const std::vector<EvalRecord> &records, const std::string &method,
                std::size_t gap_cols) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const EvalRecord &r : records) {
    if (!method.empty() && r.method != method) continue;
    if (gap_cols != 0 && r.gap_cols != gap_cols) continue;
    sum += r.snr_db;
    ++count;
  }
  if (count == 0) throw InvalidArgument("mean_snr: no matching records");
  return sum / double(count);
}

}  // namespace tfpaint
