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

#ifndef XCLUST_STATS_HPP_
#define XCLUST_STATS_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace xclust::stats {

// One-sided exact binomial test against p = 1/2: P(X >= n_pos) for
// X ~ Binomial(n, 1/2). Terms are summed in log space over the shorter tail,
// so the result is accurate to ~1e-14 absolute for any n.
double BinomTestGreater(std::size_t n_pos, std::size_t n);

// Standard normal quantile. Acklam's rational approximation followed by one
// Halley step against erfc; absolute error below 1e-12 on (0, 1).
double NormalQuantile(double p);

struct MedianCi {
  double lower = 0.0;
  double upper = 0.0;
  // 1-based order-statistic indices of the bounds.
  std::size_t lo_index = 0;
  std::size_t hi_index = 0;
};

// Order-statistic interval for the median of n values:
//   lo = floor((n+1)/2 - q * sqrt(n) / 2),  hi = ceil((n+1)/2 + q * sqrt(n) / 2)
// with q the 1 - alpha/2 normal quantile, both clamped to [1, n].
MedianCi MedianConfidenceInterval(std::span<const double> values, double alpha);
// Index arithmetic only.
std::pair<std::size_t, std::size_t> MedianCiIndices(std::size_t n, double alpha);

// Median taking the lower-middle order statistic for even sizes.
double LowerMedian(std::span<const double> values);

}  // namespace xclust::stats

#endif  // XCLUST_STATS_HPP_
