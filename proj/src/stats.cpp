/*
 * Copyright 2026 The xclust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "xclust/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xclust/error.hpp"

namespace xclust::stats {
namespace {

// Sum of P(X = i) for i in [from, to], X ~ Binomial(n, 1/2).
long double TailSum(std::size_t from, std::size_t to, std::size_t n) {
  const long double log_norm = std::lgammal(static_cast<long double>(n) + 1.0L) -
                               static_cast<long double>(n) * std::numbers::ln2_v<long double>;
  long double sum = 0.0L;
  for (std::size_t i = from; i <= to; ++i) {
    const long double log_term = log_norm -
                                 std::lgammal(static_cast<long double>(i) + 1.0L) -
                                 std::lgammal(static_cast<long double>(n - i) + 1.0L);
    sum += std::exp(log_term);
  }
  return sum;
}

}  // namespace

double BinomTestGreater(std::size_t n_pos, std::size_t n) {
  if (n < 1 || n_pos > n) {
    throw Error(ErrorCode::kInvalidCounts,
                "need 0 <= n_pos <= n and n >= 1, got n_pos=" + std::to_string(n_pos) +
                    ", n=" + std::to_string(n));
  }
  if (n_pos == 0) return 1.0;
  // Sum whichever tail is shorter: [n_pos, n] directly, or one minus
  // [0, n_pos - 1].
  if (2 * n_pos > n) {
    return static_cast<double>(std::min(TailSum(n_pos, n, n), 1.0L));
  }
  const long double lower = TailSum(0, n_pos - 1, n);
  return static_cast<double>(std::clamp(1.0L - lower, 0.0L, 1.0L));
}

double NormalQuantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -HUGE_VAL;
    if (p == 1.0) return HUGE_VAL;
    throw Error(ErrorCode::kInvalidSpec, "quantile probability outside [0, 1]");
  }
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00, 2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  double x;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::pair<std::size_t, std::size_t> MedianCiIndices(std::size_t n, double alpha) {
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, "median CI needs at least 2 values");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidSpec, "alpha outside (0, 1)");
  const double q = NormalQuantile(1.0 - alpha / 2.0);
  const double centre = (static_cast<double>(n) + 1.0) / 2.0;
  const double half_width = q * std::sqrt(static_cast<double>(n)) / 2.0;
  const double lo = std::floor(centre - half_width);
  const double hi = std::ceil(centre + half_width);
  const double top = static_cast<double>(n);
  return {static_cast<std::size_t>(std::clamp(lo, 1.0, top)),
          static_cast<std::size_t>(std::clamp(hi, 1.0, top))};
}

MedianCi MedianConfidenceInterval(std::span<const double> values, double alpha) {
  const auto [lo, hi] = MedianCiIndices(values.size(), alpha);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {sorted[lo - 1], sorted[hi - 1], lo, hi};
}

double LowerMedian(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kTooFewSamples, "median of empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  const std::size_t mid = (sorted.size() - 1) / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
  return sorted[mid];
}

}  // namespace xclust::stats
