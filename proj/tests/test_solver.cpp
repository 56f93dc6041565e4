#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "tfpaint/errors.hpp"
#include "tfpaint/solver.hpp"

using namespace tfpaint;
using namespace tfpaint::testing;

namespace {

// Sum of cosines at the given frequencies in cycles per sample.
RealVector tones(std::initializer_list<double> freqs, std::size_t len) {
  RealVector x(len, 0.0);
  double phase = 0.2;
  for (double f : freqs) {
    for (std::size_t l = 0; l < len; ++l)
      x[l] += std::cos(2.0 * std::numbers::pi * f * double(l) + phase);
    phase += 1.1;
  }
  return x;
}

// Corrupted, peak-normalized segment built from a clean signal.
struct Segment {
  Spectrogram clean;
  Spectrogram corrupted;
  ColumnMask mask;
};

Segment make_segment(const RealVector &x, const StftConfig &cfg,
                     std::vector<std::size_t> gap) {
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  Segment s{analyze(x, w.g, cfg), {}, ColumnMask::make(cfg.frames(), gap)};
  s.corrupted = s.clean;
  for (std::size_t n : gap)
    for (std::size_t m = 0; m < cfg.channels; ++m) s.corrupted.data(m, n) = 0.0;
  const RealVector y = synthesize(s.corrupted, w.g, cfg);
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  for (Complex &z : s.corrupted.data.values()) z /= peak;
  for (Complex &z : s.clean.data.values()) z /= peak;
  return s;
}

bool reliable_columns_equal(const Spectrogram &out, const Spectrogram &in,
                            const ColumnMask &mask) {
  for (std::size_t n = 0; n < in.cols(); ++n) {
    if (mask.is_missing(n)) continue;
    for (std::size_t m = 0; m < in.rows(); ++m)
      if (out(m, n) != in(m, n)) return false;
  }
  return true;
}

SolverConfig quick_config() {
  SolverConfig cfg;
  cfg.inner_iters = 40;
  cfg.outer_iters = 2;
  return cfg;
}

}  // namespace

TEST_CASE("solver configuration checks the step-size conditions") {
  CHECK_NOTHROW(SolverConfig{}.validate());

  SolverConfig c;
  c.tau = 0.3;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c.unsafe_step_sizes = true;
  CHECK_NOTHROW(c.validate());

  c = SolverConfig{};
  c.eta = 4.5;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.sigma = 1.01;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  for (double alpha : {0.0, 2.0, -1.0}) {
    c = SolverConfig{};
    c.alpha_relax = alpha;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
  }
  c = SolverConfig{};
  c.inner_iters = 0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.lambda = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);

  const SolverConfig ph = SolverConfig::with_thresholder(ThresholderKind::kPShrinkage);
  CHECK(ph.thresholder.p == 0.9);
  CHECK(ph.effective_thresholder().lambda == ph.lambda);
}

TEST_CASE("operator norm estimates") {
  const RealVector probe = random_signal(300, 1);
  const auto id = [](const RealVector &v) { return v; };
  CHECK(std::abs(operator_norm_estimate(id, id, probe, 20) - 1.0) <= 1e-9);

  const auto twice = [](const RealVector &v) {
    RealVector out = v;
    for (double &x : out) x *= 2.0;
    return out;
  };
  CHECK(std::abs(operator_norm_estimate(twice, twice, probe, 5) - 2.0) <= 1e-12);
  CHECK_THROWS(operator_norm_estimate(id, id, RealVector(4, 0.0), 5));

  const StftConfig cfg = StftConfig::defaults(8192);
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const auto ana = [&](const RealVector &x) { return analyze(x, w.g, cfg).data; };
  const auto syn = [&](const ComplexMatrix &X) {
    return synthesize_real_part(Spectrogram{cfg, X}, w.g, cfg);
  };
  const RealVector x0 = random_signal(cfg.signal_len, 2);
  CHECK(std::abs(operator_norm_estimate(ana, syn, x0, 30) - 1.0) <= 1e-6);

  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const IFMatrix omega{random_real_matrix(cfg.channels, cfg.frames(), seed + 10, 40.0)};
    const auto fwd = [&](const RealVector &x) {
      return time_variation(phase_correct(analyze(x, w.g, cfg), omega).data);
    };
    const auto adj = [&](const ComplexMatrix &V) {
      const Spectrogram U{cfg, time_variation_adjoint(V)};
      return synthesize_real_part(phase_correct_adjoint(U, omega), w.g, cfg);
    };
    const double norm = operator_norm_estimate(fwd, adj, x0, 60);
    CHECK(norm <= 2.0 + 1e-6);
    CHECK(norm > 1.0);
  }
}

TEST_CASE("fully observed problem is solved to feasibility") {
  const StftConfig cfg{64, 16, 64, 512};
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const Spectrogram X = analyze(random_signal(cfg.signal_len, 3), w.g, cfg);
  const ColumnMask mask = ColumnMask::none(cfg.frames());
  const IFMatrix omega = estimate_if(synthesize(X, w.g, cfg), w.g, w.g_prime, cfg);

  SolverState s0 = SolverState::initial(X);
  std::fill(s0.x.begin(), s0.x.end(), 0.0);
  SolverConfig sc;
  sc.inner_iters = 200;
  const SolverState s = gcpa_inner(s0, mask, X, omega, sc);
  const Spectrogram A = analyze(s.x, w.g, cfg);
  ComplexMatrix diff = A.data;
  for (std::size_t i = 0; i < diff.size(); ++i) diff.values()[i] -= X.data.values()[i];
  CHECK(frobenius_norm(diff) <= 1e-6);
}

TEST_CASE("zero spectrogram is a fixed point") {
  const StftConfig cfg{64, 16, 64, 256};
  const Spectrogram X = Spectrogram::zeros(cfg);
  const ColumnMask mask = ColumnMask::make(cfg.frames(), {5, 6});
  const IFMatrix omega{random_real_matrix(64, cfg.frames(), 4, 5.0)};
  const SolverState s = gcpa_inner(SolverState::initial(X), mask, X, omega, SolverConfig{});
  for (double v : s.x) CHECK(v == 0.0);
  CHECK(max_abs(s.Y) == 0.0);
  CHECK(max_abs(s.Z) == 0.0);

  const SolveResult r = uphain_tf(X, mask, quick_config());
  CHECK(max_abs(r.output.data) == 0.0);
  CHECK(max_abs(cpa_tf_only(X, mask, quick_config()).output.data) == 0.0);
}

TEST_CASE("iterates stay at an annihilated signal without a gap") {
  // Bin-centred tone, periodic in the frame: its iPCTV vanishes everywhere.
  const StftConfig cfg = StftConfig::defaults(8192);
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const RealVector x = tones({64.0 / 2048.0}, cfg.signal_len);
  const Spectrogram X = analyze(x, w.g, cfg);
  const IFMatrix omega = estimate_if(x, w.g, w.g_prime, cfg);
  SolverConfig sc;
  sc.inner_iters = 50;
  const SolverState s0 = SolverState::initial(X);
  const SolverState s = gcpa_inner(s0, ColumnMask::none(cfg.frames()), X, omega, sc);
  double drift = 0.0;
  for (std::size_t l = 0; l < s.x.size(); ++l) drift = std::max(drift, std::abs(s.x[l] - s0.x[l]));
  CHECK(drift <= 1e-8);
  CHECK(max_abs(s.Y) <= 1e-8);
  CHECK(max_abs(s.Z) <= 1e-8);
}

TEST_CASE("composite objective trends down on a sinusoid with a one-column gap") {
  const StftConfig cfg = StftConfig::defaults(512 * 16);
  const Segment seg = make_segment(tones({440.0 / 16000.0}, cfg.signal_len), cfg, {8});
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const SolverState s0 = SolverState::initial(seg.corrupted);
  const IFMatrix omega = estimate_if(s0.x, w.g, w.g_prime, cfg);

  std::vector<double> sampled;
  std::size_t calls = 0;
  const TraceFn trace = [&](const TraceEntry &e) {
    ++calls;
    if (e.inner == 0 || (e.inner + 1) % 50 == 0) sampled.push_back(e.objective);
  };
  gcpa_inner(s0, seg.mask, seg.corrupted, omega, SolverConfig{}, trace);
  CHECK(calls == 500);
  REQUIRE(sampled.size() == 11);
  // Slack of 1e-6 relative to the starting objective.
  const double slack = 1e-6 * sampled.front();
  for (std::size_t k = 1; k < sampled.size(); ++k) {
    CAPTURE(k);
    CHECK(sampled[k] <= sampled[k - 1] + slack);
  }
  CHECK(sampled.back() < sampled.front());
}

TEST_CASE("solver outputs keep reliable columns bit-exact") {
  const StftConfig cfg{64, 16, 64, 512};
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  Spectrogram X = analyze(random_signal(cfg.signal_len, 7), w.g, cfg);
  const ColumnMask mask = ColumnMask::make(cfg.frames(), {9, 10, 11, 20});
  for (std::size_t n : mask.zero_cols)
    for (std::size_t m = 0; m < 64; ++m) X.data(m, n) = 0.0;

  SolverConfig sc = quick_config();
  CHECK(reliable_columns_equal(uphain_tf(X, mask, sc).output, X, mask));
  CHECK(reliable_columns_equal(bphain_tf(X, mask, sc).output, X, mask));
  CHECK(reliable_columns_equal(cpa_tf_only(X, mask, sc).output, X, mask));
  sc.alpha_relax = 1.5;
  CHECK(reliable_columns_equal(uphain_tf(X, mask, sc).output, X, mask));
  CHECK(reliable_columns_equal(cpa_tf_only(X, mask, sc).output, X, mask));

  const SolveResult r = uphain_tf(X, mask, sc);
  CHECK(r.output.config.signal_len == cfg.signal_len);
  CHECK(r.output.rows() == 64);
  CHECK(r.output.cols() == cfg.frames());
  for (std::size_t n = 0; n < r.output.cols(); ++n)
    for (std::size_t m = 1; m < 64; ++m)
      CHECK(r.output(64 - m, n) == std::conj(r.output(m, n)));
}

TEST_CASE("nothing missing returns the observation") {
  const StftConfig cfg{64, 16, 64, 256};
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const Spectrogram X = analyze(random_signal(cfg.signal_len, 8), w.g, cfg);
  const ColumnMask mask = ColumnMask::none(cfg.frames());
  CHECK(uphain_tf(X, mask, quick_config()).output.data == X.data);
  CHECK(bphain_tf(X, mask, quick_config()).output.data == X.data);
  CHECK(cpa_tf_only(X, mask, quick_config()).output.data == X.data);
}

TEST_CASE("oracle variant with the corrupted signal as oracle") {
  const StftConfig cfg{64, 16, 64, 512};
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  const Segment seg = make_segment(tones({0.05, 0.13}, cfg.signal_len), cfg, {12, 13});
  const RealVector oracle = synthesize(seg.corrupted, w.g, cfg);
  const SolverConfig sc = quick_config();
  const SolveResult a = bphain_tf(seg.corrupted, seg.mask, sc);
  const SolveResult b = bphain_tf(seg.corrupted, seg.mask, sc, oracle);
  CHECK(a.output.data == b.output.data);
  CHECK(a.outer_iters_used == 1);

  const RealVector truth = synthesize(seg.clean, w.g, cfg);
  const SolveResult c = bphain_tf(seg.corrupted, seg.mask, sc, truth);
  CHECK(c.output.data != a.output.data);
  CHECK_THROWS_AS(bphain_tf(seg.corrupted, seg.mask, sc, RealVector(10)), InvalidArgument);
}

TEST_CASE("outer loop stops early on a stationary multitone") {
  const StftConfig cfg = StftConfig::defaults(512 * 16);
  const Segment seg = make_segment(
      tones({440.0 / 16000.0, 660.0 / 16000.0, 1250.0 / 16000.0}, cfg.signal_len), cfg, {8});
  const SolveResult r = uphain_tf(seg.corrupted, seg.mask, SolverConfig{});
  CHECK(r.early_stopped);
  CHECK(r.outer_iters_used < 11);
  CHECK(r.outer_iters_used >= 3);

  SolverConfig never = quick_config();
  never.epsilon = 0.0;
  const SolveResult full = uphain_tf(seg.corrupted, seg.mask, never);
  CHECK_FALSE(full.early_stopped);
  CHECK(full.outer_iters_used == never.outer_iters + 1);
}

TEST_CASE("trace reports every inner iteration of every pass") {
  const StftConfig cfg{64, 16, 64, 256};
  const Segment seg = make_segment(random_signal(cfg.signal_len, 12), cfg, {6});
  SolverConfig sc = quick_config();
  sc.epsilon = 0.0;
  std::vector<TraceEntry> entries;
  uphain_tf(seg.corrupted, seg.mask, sc, [&](const TraceEntry &e) { entries.push_back(e); });
  REQUIRE(entries.size() == (sc.outer_iters + 1) * sc.inner_iters);
  CHECK(entries.front().outer == 0);
  CHECK(entries.back().outer == sc.outer_iters);
  CHECK(entries.back().inner == sc.inner_iters - 1);
  for (const TraceEntry &e : entries) {
    CHECK(std::isfinite(e.objective));
    CHECK(e.feasibility_residual >= 0.0);
  }
}

TEST_CASE("non-finite iterates raise a divergence error") {
  const StftConfig cfg{64, 16, 64, 256};
  const AnalysisWindows w = AnalysisWindows::tight_hann(cfg);
  Spectrogram X = analyze(random_signal(cfg.signal_len, 9), w.g, cfg);
  const ColumnMask mask = ColumnMask::make(cfg.frames(), {7});
  const IFMatrix omega{RealMatrix(64, cfg.frames(), 0.0)};
  SolverState s0 = SolverState::initial(X);
  X.data(3, 2) = Complex(std::nan(""), 0.0);
  X.data(61, 2) = Complex(std::nan(""), 0.0);
  try {
    gcpa_inner(s0, mask, X, omega, SolverConfig{});
    FAIL("expected divergence");
  } catch (const DivergenceError &e) {
    CHECK(e.iteration() == 0);
  }

  // Steps far beyond the convergence conditions blow up.
  X = analyze(random_signal(cfg.signal_len, 9), w.g, cfg);
  SolverConfig wild;
  wild.tau = 50.0;
  wild.sigma = 50.0;
  wild.eta = 50.0;
  wild.alpha_relax = 1.9;
  wild.inner_iters = 5000;
  wild.unsafe_step_sizes = true;
  CHECK_THROWS_AS(gcpa_inner(s0, mask, X, omega, wild), DivergenceError);
}

TEST_CASE("solver rejects inconsistent inputs") {
  const StftConfig cfg{64, 16, 64, 256};
  const Spectrogram X = Spectrogram::zeros(cfg);
  const ColumnMask mask = ColumnMask::none(cfg.frames());
  const IFMatrix omega{RealMatrix(64, cfg.frames(), 0.0)};
  SolverState s0 = SolverState::initial(X);

  CHECK_THROWS_AS(gcpa_inner(s0, ColumnMask::none(3), X, omega, SolverConfig{}),
                  InvalidArgument);
  CHECK_THROWS_AS(gcpa_inner(s0, mask, X, IFMatrix{RealMatrix(64, 3)}, SolverConfig{}),
                  InvalidArgument);
  SolverState bad = s0;
  bad.Z = ComplexMatrix(64, cfg.frames());
  CHECK_THROWS_AS(gcpa_inner(bad, mask, X, omega, SolverConfig{}), InvalidArgument);
  SolverConfig unsafe;
  unsafe.tau = 1.0;
  CHECK_THROWS_AS(uphain_tf(X, mask, unsafe), InvalidArgument);
}

TEST_CASE("solver runs are deterministic across threads") {
  const StftConfig cfg{64, 16, 64, 512};
  const Segment seg = make_segment(tones({0.07, 0.19}, cfg.signal_len), cfg, {14, 15});
  const SolverConfig sc = quick_config();
  const Spectrogram ref = uphain_tf(seg.corrupted, seg.mask, sc).output;
  CHECK(uphain_tf(seg.corrupted, seg.mask, sc).output.data == ref.data);

  std::vector<Spectrogram> outs(4);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < outs.size(); ++t)
    pool.emplace_back([&, t] { outs[t] = uphain_tf(seg.corrupted, seg.mask, sc).output; });
  for (auto &th : pool) th.join();
  for (const Spectrogram &o : outs) CHECK(o.data == ref.data);
}
