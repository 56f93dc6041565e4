#ifndef TFPAINT_TESTS_TEST_UTIL_HPP_
#define TFPAINT_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "tfpaint/stft.hpp"

namespace tfpaint::testing {

inline RealVector random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  RealVector x(n);
  for (double &v : x) v = dist(rng);
  return x;
}

inline ComplexMatrix random_complex(std::size_t rows, std::size_t cols,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  ComplexMatrix X(rows, cols);
  for (Complex &z : X.values()) z = Complex(dist(rng), dist(rng));
  return X;
}

// Random matrix with X[M-m, n] = conj(X[m, n]).
inline ComplexMatrix random_hermitian(std::size_t rows, std::size_t cols,
                                      std::uint64_t seed) {
  const ComplexMatrix Y = random_complex(rows, cols, seed);
  ComplexMatrix X(rows, cols);
  for (std::size_t n = 0; n < cols; ++n)
    for (std::size_t m = 0; m < rows; ++m)
      X(m, n) = 0.5 * (Y(m, n) + std::conj(Y((rows - m) % rows, n)));
  return X;
}

inline RealMatrix random_real_matrix(std::size_t rows, std::size_t cols,
                                     std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  RealMatrix R(rows, cols);
  for (double &v : R.values()) v = dist(rng);
  return R;
}

// Window value at circular offset j, zero outside its support.
inline double window_at(const Window &g, long long j, std::size_t L) {
  const long long len = static_cast<long long>(L);
  const long long k = ((j % len) + len) % len;
  return k < static_cast<long long>(g.size()) ? g[static_cast<std::size_t>(k)] : 0.0;
}

// Direct O(M N L) evaluation of X[m,n] = sum_l x[l] g[l - a n] e^{-i 2 pi m l / M}.
inline ComplexMatrix brute_force_stft(const RealVector &x, const Window &g,
                                      const StftConfig &cfg) {
  const std::size_t M = cfg.channels, N = cfg.frames(), L = cfg.signal_len;
  ComplexMatrix X(M, N);
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t m = 0; m < M; ++m) {
      Complex s = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double w = window_at(g, static_cast<long long>(l) -
                                          static_cast<long long>(cfg.hop * n), L);
        if (w == 0.0) continue;
        s += x[l] * w *
             std::polar(1.0, -2.0 * std::numbers::pi * double((m * l) % M) / double(M));
      }
      X(m, n) = s;
    }
  return X;
}

// Direct evaluation of sum_m sum_n X[m,n] g[l - a n] e^{+i 2 pi m l / M}.
inline std::vector<Complex> brute_force_istft(const ComplexMatrix &X,
                                              const Window &g,
                                              const StftConfig &cfg) {
  const std::size_t M = cfg.channels, N = cfg.frames(), L = cfg.signal_len;
  std::vector<Complex> x(L);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t n = 0; n < N; ++n) {
      const double w = window_at(g, static_cast<long long>(l) -
                                        static_cast<long long>(cfg.hop * n), L);
      if (w == 0.0) continue;
      for (std::size_t m = 0; m < M; ++m)
        x[l] += X(m, n) * w *
                std::polar(1.0, 2.0 * std::numbers::pi * double((m * l) % M) / double(M));
    }
  return x;
}

inline double max_abs_diff(const ComplexMatrix &a, const ComplexMatrix &b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

inline double rel_diff(const RealVector &a, const RealVector &b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num / den);
}

}  // namespace tfpaint::testing

#endif  // TFPAINT_TESTS_TEST_UTIL_HPP_
