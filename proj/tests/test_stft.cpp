#include <cmath>
#include <numbers>
#include <numeric>
#include <thread>

#include "doctest.h"
#include "test_util.hpp"
#include "tfpaint/errors.hpp"
#include "tfpaint/stft.hpp"

using namespace tfpaint;
using namespace tfpaint::testing;

namespace {

struct Frame {
  StftConfig cfg;
  Window g;
};

Frame default_frame(std::size_t signal_len) {
  StftConfig cfg = StftConfig::defaults(signal_len);
  return {cfg, tight_window(make_hann(cfg.window_len), cfg)};
}

}  // namespace

TEST_CASE("make_hann values") {
  const Window w = make_hann(4);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[2] == doctest::Approx(1.0));
  const Window big = make_hann(2048);
  const double sum = std::accumulate(big.samples.begin(), big.samples.end(), 0.0);
  CHECK(std::abs(sum - 1024.0) <= 1e-9);
  for (double v : big.samples) CHECK((v >= 0.0 && v <= 1.0));
  // periodic symmetry w[k] = w[n - k]
  for (std::size_t k = 1; k < 2048; ++k) CHECK(std::abs(big[k] - big[2048 - k]) < 1e-15);
  CHECK_THROWS_AS(make_hann(1), InvalidArgument);
}

TEST_CASE("make_hann_derivative values") {
  const Window w = make_hann_derivative(4);
  CHECK(std::abs(w[0]) < 1e-15);
  CHECK(w[1] == doctest::Approx(std::numbers::pi / 4));
  const Window big = make_hann_derivative(2048);
  const double sum = std::accumulate(big.samples.begin(), big.samples.end(), 0.0);
  CHECK(std::abs(sum) <= 1e-12);
  CHECK_THROWS_AS(make_hann_derivative(0), InvalidArgument);
}

TEST_CASE("tight window is idempotent") {
  const StftConfig cfg = StftConfig::defaults(8192);
  const Window g1 = tight_window(make_hann(2048), cfg);
  const Window g2 = tight_window(g1, cfg);
  double num = 0, den = 0;
  for (std::size_t k = 0; k < g1.size(); ++k) {
    num += (g1[k] - g2[k]) * (g1[k] - g2[k]);
    den += g1[k] * g1[k];
  }
  CHECK(std::sqrt(num / den) <= 1e-12);
}

TEST_CASE("degenerate window is rejected") {
  StftConfig cfg{8, 4, 8, 32};
  Window g{RealVector{1, 1, 1, 0, 1, 1, 1, 0}, WindowKind::kCustom};
  CHECK_THROWS_AS(tight_window(g, cfg), DegenerateWindow);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS((StftConfig{2048, 512, 2048, 1000}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StftConfig{2048, 512, 1024, 8192}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StftConfig{2048, 4096, 2048, 8192}.validate()), InvalidArgument);
  CHECK_THROWS_AS((StftConfig{2048, 512, 2048, 1024}.validate()), InvalidArgument);
  CHECK_NOTHROW(StftConfig::defaults(79872).validate());
  CHECK(StftConfig::defaults(79872).frames() == 156);
}

TEST_CASE("analysis matches direct summation") {
  // Small geometries, including channels > window_len and odd channels.
  const StftConfig cfgs[] = {{8, 2, 8, 32}, {8, 4, 12, 24}, {6, 3, 9, 18}};
  for (const StftConfig &cfg : cfgs) {
    const Window g = tight_window(make_hann(cfg.window_len), cfg);
    const RealVector x = random_signal(cfg.signal_len, 11);
    const Spectrogram X = analyze(x, g, cfg);
    CHECK(max_abs_diff(X.data, brute_force_stft(x, g, cfg)) < 1e-12);

    const ComplexMatrix Y = random_hermitian(cfg.channels, cfg.frames(), 12);
    const std::vector<Complex> ref = brute_force_istft(Y, g, cfg);
    const RealVector y = synthesize({cfg, Y}, g, cfg);
    for (std::size_t l = 0; l < y.size(); ++l) {
      CHECK(std::abs(y[l] - ref[l].real()) < 1e-12);
      CHECK(std::abs(ref[l].imag()) < 1e-12);
    }
    // Perfect reconstruction also holds for these tiny tight frames.
    CHECK(rel_diff(x, synthesize(X, g, cfg)) < 1e-12);
  }
}

TEST_CASE("analysis of zero and constant signals") {
  const Frame f = default_frame(8192);
  const Spectrogram Z = analyze(RealVector(8192, 0.0), f.g, f.cfg);
  CHECK(max_abs(Z.data) == 0.0);

  const Spectrogram C = analyze(RealVector(8192, 1.0), f.g, f.cfg);
  const double gsum = std::accumulate(f.g.samples.begin(), f.g.samples.end(), 0.0);
  // A periodic Hann is 0.5 - 0.25 e^{i theta} - 0.25 e^{-i theta}, so the
  // windowed constant has energy in bins 0 and +-1 only.
  const std::size_t M = C.rows();
  for (std::size_t n = 0; n < C.cols(); ++n) {
    CHECK(std::abs(C(0, n) - gsum) < 1e-10);
    CHECK(std::abs(std::abs(C(1, n)) - gsum / 2) < 1e-10);
    CHECK(std::abs(std::abs(C(M - 1, n)) - gsum / 2) < 1e-10);
    for (std::size_t m = 2; m + 1 < M; ++m) CHECK(std::abs(C(m, n)) < 1e-10);
  }
}

TEST_CASE("conjugate symmetry of real-signal spectrograms") {
  const Frame f = default_frame(8192);
  const Spectrogram X = analyze(random_signal(8192, 3), f.g, f.cfg);
  const std::size_t M = X.rows();
  for (std::size_t n = 0; n < X.cols(); ++n)
    for (std::size_t m = 1; m < M; ++m) CHECK(X(M - m, n) == std::conj(X(m, n)));
}

TEST_CASE("perfect reconstruction and Parseval") {
  const Frame f = default_frame(8192);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RealVector x = random_signal(8192, seed);
    const Spectrogram X = analyze(x, f.g, f.cfg);
    CHECK(rel_diff(x, synthesize(X, f.g, f.cfg)) <= 1e-10);
    CHECK(std::abs(frobenius_norm(X.data) - norm2(x)) <= 1e-10 * norm2(x));
  }
  const RealVector zero = synthesize(Spectrogram::zeros(f.cfg), f.g, f.cfg);
  CHECK(norm2(zero) == 0.0);
}

TEST_CASE("analysis and synthesis are adjoint") {
  const Frame f = default_frame(8192);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RealVector x = random_signal(8192, seed);
    const Spectrogram X = analyze(x, f.g, f.cfg);
    // Hermitian Y goes through the checked synthesis; arbitrary Y through the
    // unchecked real part.
    const Spectrogram Yh{f.cfg, random_hermitian(2048, 16, seed + 100)};
    const double lhs = inner_real(X.data, Yh.data);
    const double rhs = dot(x, synthesize(Yh, f.g, f.cfg));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));

    const Spectrogram Y{f.cfg, random_complex(2048, 16, seed + 200)};
    const double lhs2 = inner_real(X.data, Y.data);
    const double rhs2 = dot(x, synthesize_real_part(Y, f.g, f.cfg));
    CHECK(std::abs(lhs2 - rhs2) <= 1e-10 * std::max(1.0, std::abs(lhs2)));
  }
}

TEST_CASE("synthesis rejects non-symmetric spectrograms") {
  const Frame f = default_frame(8192);
  const Spectrogram Y{f.cfg, random_complex(2048, 16, 5)};
  CHECK_THROWS_AS(synthesize(Y, f.g, f.cfg), InvalidArgument);
  CHECK_NOTHROW(synthesize_real_part(Y, f.g, f.cfg));
}

TEST_CASE("shape and length errors") {
  const Frame f = default_frame(8192);
  CHECK_THROWS_AS(analyze(RealVector(8000), f.g, f.cfg), InvalidArgument);
  const Spectrogram bad{f.cfg, ComplexMatrix(2048, 15)};
  CHECK_THROWS_AS(synthesize(bad, f.g, f.cfg), InvalidArgument);
  CHECK_THROWS_AS(analyze(RealVector(8192), make_hann(1024), f.cfg), InvalidArgument);
}

TEST_CASE("frequency-invariant phase: shifting by M samples shifts columns") {
  const Frame f = default_frame(16384);
  const std::size_t M = f.cfg.channels;
  const RealVector x = random_signal(16384, 8);
  RealVector shifted(x.size());
  for (std::size_t l = 0; l < x.size(); ++l) shifted[(l + M) % x.size()] = x[l];
  const Spectrogram X = analyze(x, f.g, f.cfg);
  const Spectrogram S = analyze(shifted, f.g, f.cfg);
  const std::size_t step = M / f.cfg.hop;
  for (std::size_t n = step; n < X.cols(); ++n)
    for (std::size_t m = 0; m < M; ++m)
      CHECK(std::abs(S(m, n) - X(m, n - step)) <= 1e-10);
}

TEST_CASE("half representation round trip") {
  const ComplexMatrix H = random_hermitian(10, 3, 1);
  CHECK(max_abs_diff(expand_hermitian(fold_hermitian(H), 10), H) < 1e-15);
  const ComplexMatrix H9 = random_hermitian(9, 3, 2);
  CHECK(max_abs_diff(expand_hermitian(fold_hermitian(H9), 9), H9) < 1e-15);
  const RealVector w = hermitian_row_weights(10);
  CHECK(w.size() == 6);
  CHECK(w.front() == 1.0);
  CHECK(w.back() == 1.0);
  CHECK(hermitian_row_weights(9).back() == 2.0);
}

TEST_CASE("analysis is bit-identical across threads") {
  const Frame f = default_frame(16384);
  const RealVector x = random_signal(16384, 21);
  const Spectrogram ref = analyze(x, f.g, f.cfg);
  std::vector<Spectrogram> results(4);
  std::vector<std::thread> threads;
  for (std::size_t t = 0; t < results.size(); ++t)
    threads.emplace_back([&, t] { results[t] = analyze(x, f.g, f.cfg); });
  for (auto &th : threads) th.join();
  for (const auto &r : results) CHECK(r.data == ref.data);
}
