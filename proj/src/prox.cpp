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

#include "tfpaint/prox.hpp"

#include <algorithm>
#include <cmath>

#include "tfpaint/errors.hpp"

namespace tfpaint {

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("threshold: lambda must be a nonnegative finite number");
}

// Each entrywise rule maps z to z * gain(|z|).
double soft_gain(double r, double lambda) {
  return r > lambda ? 1.0 - lambda / r : 0.0;
}

double pshrink_gain(double r, double lambda, double p) {
  if (p == 1.0) return soft_gain(r, lambda);
  if (r == 0.0) return 0.0;
  return std::max(1.0 - std::pow(lambda, 2.0 - p) * std::pow(r, p - 2.0), 0.0);
}

double smooth_hard_gain(double r, double lambda, double alpha) {
  // |X| == lambda would divide by zero; it belongs to the zero branch.
  if (!(r > lambda)) return 0.0;
  const double d = std::expm1(r - lambda);
  return std::exp(-alpha / (d * d));
}

template <typename Gain>
void apply_gain(ComplexMatrix &X, Gain gain) {
  for (Complex &z : X.values()) z *= gain(fast_abs(z));
}

double weighted_norm(const ComplexMatrix &X, std::span<const double> row_weights) {
  if (row_weights.empty()) return frobenius_norm(X);
  double s = 0.0;
  for (std::size_t n = 0; n < X.cols(); ++n) {
    auto c = X.col(n);
    for (std::size_t m = 0; m < c.size(); ++m) s += row_weights[m] * std::norm(c[m]);
  }
  return std::sqrt(s);
}

}  // namespace

void Thresholder::validate() const {
  check_lambda(lambda);
  if (kind == ThresholderKind::kPShrinkage && !(p > -1.0 && p <= 1.0))
    throw InvalidArgument("p-shrinkage: p must lie in (-1, 1]");
  if (kind == ThresholderKind::kSmoothHard && !(alpha > 0.0))
    throw InvalidArgument("smooth-hard: alpha must be positive");
}

Thresholder Thresholder::defaults(ThresholderKind kind) {
  switch (kind) {
    case ThresholderKind::kSoft: return {kind, 0.01};
    case ThresholderKind::kPShrinkage: return {kind, 0.01, 0.9};
    case ThresholderKind::kSmoothHard: return {kind, 1e-3, 1.0, 1e-2};
    case ThresholderKind::kL2Block: return {kind, 1.0};
    case ThresholderKind::kL2Squared: return {kind, 0.2};
  }
  throw InvalidArgument("unknown thresholder kind");
}

void Thresholder::apply(ComplexMatrix &X, double scale,
                        std::span<const double> row_weights) const {
  const double lam = lambda * scale;
  switch (kind) {
    case ThresholderKind::kSoft:
      apply_gain(X, [lam](double r) { return soft_gain(r, lam); });
      return;
    case ThresholderKind::kPShrinkage:
      apply_gain(X, [lam, this](double r) { return pshrink_gain(r, lam, p); });
      return;
    case ThresholderKind::kSmoothHard:
      apply_gain(X, [lam, this](double r) { return smooth_hard_gain(r, lam, alpha); });
      return;
    case ThresholderKind::kL2Block: {
      const double norm = weighted_norm(X, row_weights);
      const double gain = norm > lam ? 1.0 - lam / norm : 0.0;
      for (Complex &z : X.values()) z *= gain;
      return;
    }
    case ThresholderKind::kL2Squared: {
      const double gain = 1.0 / (1.0 + 2.0 * lam);
      for (Complex &z : X.values()) z *= gain;
      return;
    }
  }
}

std::string to_string(ThresholderKind kind) {
  switch (kind) {
    case ThresholderKind::kSoft: return "soft";
    case ThresholderKind::kPShrinkage: return "pshrink";
    case ThresholderKind::kSmoothHard: return "smoothhard";
    case ThresholderKind::kL2Block: return "l2";
    case ThresholderKind::kL2Squared: return "l2sq";
  }
  return "unknown";
}

ThresholderKind parse_thresholder_kind(const std::string &name) {
  if (name == "soft") return ThresholderKind::kSoft;
  if (name == "pshrink") return ThresholderKind::kPShrinkage;
  if (name == "smoothhard") return ThresholderKind::kSmoothHard;
  if (name == "l2") return ThresholderKind::kL2Block;
  if (name == "l2sq") return ThresholderKind::kL2Squared;
  throw InvalidArgument("unknown thresholder '" + name + "'");
}

ComplexMatrix soft_threshold(const ComplexMatrix &X, double lambda) {
  check_lambda(lambda);
  ComplexMatrix out = X;
  apply_gain(out, [lambda](double r) { return soft_gain(r, lambda); });
  return out;
}

ComplexMatrix p_shrinkage(const ComplexMatrix &X, double lambda, double p) {
  Thresholder{ThresholderKind::kPShrinkage, lambda, p}.validate();
  ComplexMatrix out = X;
  apply_gain(out, [lambda, p](double r) { return pshrink_gain(r, lambda, p); });
  return out;
}

ComplexMatrix smooth_hard(const ComplexMatrix &X, double lambda, double alpha) {
  Thresholder{ThresholderKind::kSmoothHard, lambda, 1.0, alpha}.validate();
  ComplexMatrix out = X;
  apply_gain(out, [lambda, alpha](double r) { return smooth_hard_gain(r, lambda, alpha); });
  return out;
}

ComplexMatrix prox_l2_block(const ComplexMatrix &X, double lambda) {
  check_lambda(lambda);
  ComplexMatrix out = X;
  Thresholder{ThresholderKind::kL2Block, lambda}.apply(out);
  return out;
}

ComplexMatrix prox_l2_squared(const ComplexMatrix &X, double lambda) {
  check_lambda(lambda);
  ComplexMatrix out = X;
  Thresholder{ThresholderKind::kL2Squared, lambda}.apply(out);
  return out;
}

void project_feasible_columns(ComplexMatrix &X, std::span<const unsigned char> reliable,
                              const ComplexMatrix &X_corrupted) {
  if (!X.same_shape(X_corrupted) || reliable.size() != X.cols())
    throw InvalidArgument("project_feasible: shape mismatch");
  for (std::size_t n = 0; n < X.cols(); ++n) {
    if (!reliable[n]) continue;
    auto src = X_corrupted.col(n);
    std::copy(src.begin(), src.end(), X.col(n).begin());
  }
}

Spectrogram project_feasible(const Spectrogram &X, const ColumnMask &mask,
                             const Spectrogram &X_corrupted) {
  if (mask.n_cols != X.cols())
    throw InvalidArgument("project_feasible: mask does not match spectrogram width");
  mask.validate();
  Spectrogram out = X;
  project_feasible_columns(out.data, mask.reliable_flags(), X_corrupted.data);
  return out;
}

ComplexMatrix prox_conjugate(const ProxFn &base, double eta, const ComplexMatrix &X) {
  if (!(eta > 0.0)) throw InvalidArgument("prox_conjugate: eta must be positive");
  ComplexMatrix scaled = X;
  for (Complex &z : scaled.values()) z /= eta;
  const ComplexMatrix p = base(scaled, 1.0 / eta);
  ComplexMatrix out = X;
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] -= eta * p.values()[i];
  return out;
}

}  // namespace tfpaint
