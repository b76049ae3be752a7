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

#include "xclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "xclust/error.hpp"
#include "xclust/rng.hpp"

namespace xclust {
namespace {

double Comb2(double n) { return n * (n - 1.0) / 2.0; }

void CheckK(std::size_t k, std::size_t n) {
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK,
                "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
}

struct LloydRun {
  std::vector<std::size_t> assign;
  Eigen::MatrixXd centroids;
  std::vector<double> trace;
  std::size_t iterations = 0;
};

std::vector<std::size_t> SeedPlusPlus(const Eigen::MatrixXd& x, std::size_t k, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(rng.UniformInt(n)));
  Eigen::VectorXd d2 = (x.rowwise() - x.row(static_cast<Eigen::Index>(chosen[0])))
                           .rowwise()
                           .squaredNorm();
  std::vector<bool> taken(n, false);
  taken[chosen[0]] = true;
  while (chosen.size() < k) {
    const double total = d2.sum();
    std::size_t next = n;
    if (total > 0.0) {
      const double target = rng.Uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[static_cast<Eigen::Index>(i)];
        if (acc > target && d2[static_cast<Eigen::Index>(i)] > 0.0) {
          next = i;
          break;
        }
      }
      if (next == n) {
        for (std::size_t i = n; i-- > 0;) {
          if (d2[static_cast<Eigen::Index>(i)] > 0.0) {
            next = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a center; take the first unused.
      for (std::size_t i = 0; i < n && next == n; ++i) {
        if (!taken[i]) next = i;
      }
    }
    chosen.push_back(next);
    taken[next] = true;
    d2 = d2.cwiseMin(
        (x.rowwise() - x.row(static_cast<Eigen::Index>(next))).rowwise().squaredNorm());
  }
  return chosen;
}

LloydRun RunLloyd(const Eigen::MatrixXd& x, const KMeansOptions& options, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  const std::size_t k = options.k;
  LloydRun run;
  run.centroids.resize(static_cast<Eigen::Index>(k), x.cols());
  const auto seeds = SeedPlusPlus(x, k, rng);
  for (std::size_t c = 0; c < k; ++c) {
    run.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(seeds[c]));
  }
  run.assign.assign(n, 0);
  std::vector<double> point_cost(n);

  for (std::size_t iter = 0; iter < std::max<std::size_t>(1, options.max_iter); ++iter) {
    // Assignment step.
    double inertia = 0.0;
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = x.row(static_cast<Eigen::Index>(i));
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = (run.centroids.row(static_cast<Eigen::Index>(c)) - row).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      run.assign[i] = best;
      point_cost[i] = best_d;
      inertia += best_d;
      ++counts[best];
    }
    // An emptied cluster takes the point farthest from its centroid, which
    // can only lower the objective.
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[run.assign[i]] > 1 && point_cost[i] > far_d) {
          far_d = point_cost[i];
          far = i;
        }
      }
      if (far == n) break;
      --counts[run.assign[far]];
      run.assign[far] = c;
      ++counts[c];
      inertia -= point_cost[far];
      point_cost[far] = 0.0;
      run.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(far));
    }
    run.trace.push_back(inertia);
    run.iterations = iter + 1;

    // Update step.
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(run.centroids.rows(), run.centroids.cols());
    for (std::size_t i = 0; i < n; ++i) {
      next.row(static_cast<Eigen::Index>(run.assign[i])) += x.row(static_cast<Eigen::Index>(i));
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      auto row = next.row(static_cast<Eigen::Index>(c));
      row /= static_cast<double>(counts[c]);
      shift = std::max(shift, (row - run.centroids.row(static_cast<Eigen::Index>(c))).norm());
    }
    run.centroids = std::move(next);
    if (shift < options.tol) break;
  }

  // Final assignment against the converged centroids.
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    std::size_t best = run.assign[i];
    double best_d = (run.centroids.row(static_cast<Eigen::Index>(best)) - row).squaredNorm();
    for (std::size_t c = 0; c < k; ++c) {
      const double d = (run.centroids.row(static_cast<Eigen::Index>(c)) - row).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    run.assign[i] = best;
    inertia += best_d;
  }
  if (inertia < run.trace.back()) run.trace.push_back(inertia);
  return run;
}

std::string FormatParam(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

ClusterAssignment ClusterAssignment::FromLabels(std::span<const int> raw, std::string algorithm) {
  ClusterAssignment a;
  a.algorithm = std::move(algorithm);
  std::unordered_map<int, int> remap;
  a.labels.reserve(raw.size());
  for (int v : raw) {
    auto [it, inserted] = remap.try_emplace(v, static_cast<int>(remap.size()) + 1);
    if (inserted) a.sizes.push_back(0);
    ++a.sizes[static_cast<std::size_t>(it->second - 1)];
    a.labels.push_back(it->second);
  }
  return a;
}

void to_json(nlohmann::json& j, const ClusterAssignment& a) {
  j = nlohmann::json{{"algorithm", a.algorithm},
                     {"params", a.params},
                     {"sizes", a.sizes},
                     {"n", a.labels.size()}};
}

KMeansResult KMeans(const Dataset& data, const KMeansOptions& options) {
  const Eigen::MatrixXd x = data.FeatureBlock();
  CheckK(options.k, data.rows());
  Rng rng(options.seed);

  LloydRun best;
  double best_inertia = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < std::max<std::size_t>(1, options.restarts); ++r) {
    LloydRun run = RunLloyd(x, options, rng);
    if (run.trace.back() < best_inertia) {
      best_inertia = run.trace.back();
      best = std::move(run);
    }
  }

  std::vector<int> raw(best.assign.begin(), best.assign.end());
  KMeansResult result;
  result.assignment = ClusterAssignment::FromLabels(raw, "kmeans");
  result.assignment.params = {{"k", std::to_string(options.k)},
                              {"seed", std::to_string(options.seed)},
                              {"max_iter", std::to_string(options.max_iter)},
                              {"tol", FormatParam(options.tol)},
                              {"restarts", std::to_string(options.restarts)}};
  // Reorder centroids to match the renumbered labels.
  result.centroids.resize(best.centroids.rows(), best.centroids.cols());
  std::vector<bool> placed(options.k, false);
  for (std::size_t i = 0; i < best.assign.size(); ++i) {
    const std::size_t old_c = best.assign[i];
    if (placed[old_c]) continue;
    placed[old_c] = true;
    result.centroids.row(result.assignment.labels[i] - 1) =
        best.centroids.row(static_cast<Eigen::Index>(old_c));
  }
  result.inertia = best_inertia;
  result.inertia_trace = std::move(best.trace);
  result.iterations = best.iterations;
  return result;
}

WardResult AgglomerativeWard(const Dataset& data, std::size_t k) {
  const std::size_t n = data.rows();
  CheckK(k, n);
  const Eigen::MatrixXd x = data.FeatureBlock();

  // dist(i, j) holds the Ward merge cost of clusters represented by i < j:
  // the increase in total within-cluster sum of squares, which for two
  // singletons is half their squared Euclidean distance. Lance-Williams
  // keeps it exact after every merge.
  Eigen::MatrixXd dist(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = 0.5 * (x.row(static_cast<Eigen::Index>(i)) -
                              x.row(static_cast<Eigen::Index>(j)))
                                 .squaredNorm();
      dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      dist(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = d;
    }
  }
  std::vector<double> size(n, 1.0);
  std::vector<bool> active(n, true);
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);

  WardResult result;
  for (std::size_t clusters = n; clusters > k; --clusters) {
    std::size_t bi = n, bj = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!active[j]) continue;
        const double d = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (d < best) {
          best = d;
          bi = i;
          bj = j;
        }
      }
    }
    result.merge_costs.push_back(best);
    const double ni = size[bi], nj = size[bj];
    for (std::size_t m = 0; m < n; ++m) {
      if (!active[m] || m == bi || m == bj) continue;
      const double nm = size[m];
      const auto M = static_cast<Eigen::Index>(m);
      const double updated =
          ((ni + nm) * dist(static_cast<Eigen::Index>(bi), M) +
           (nj + nm) * dist(static_cast<Eigen::Index>(bj), M) - nm * best) /
          (ni + nj + nm);
      dist(static_cast<Eigen::Index>(bi), M) = updated;
      dist(M, static_cast<Eigen::Index>(bi)) = updated;
    }
    size[bi] = ni + nj;
    active[bj] = false;
    parent[bj] = bi;
  }

  std::vector<int> raw(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t root = i;
    while (parent[root] != root) root = parent[root];
    raw[i] = static_cast<int>(root);
  }
  result.assignment = ClusterAssignment::FromLabels(raw, "ward");
  result.assignment.params = {{"k", std::to_string(k)}, {"linkage", "ward"},
                              {"metric", "euclidean"}};
  return result;
}

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, "partitions have different lengths");
  }
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : table) index += Comb2(count);
  for (const auto& [key, count] : rows) sum_rows += Comb2(count);
  for (const auto& [key, count] : cols) sum_cols += Comb2(count);
  const double total = Comb2(static_cast<double>(a.size()));
  if (total == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial (all-in-one or all-singletons on both sides).
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double AdjustedRandIndex(const ClusterAssignment& a, const ClusterAssignment& b) {
  return AdjustedRandIndex(std::span<const int>(a.labels), std::span<const int>(b.labels));
}

std::pair<ClusterAssignment, Dataset> DropSmallClusters(const ClusterAssignment& a,
                                                        const Dataset& data,
                                                        std::size_t min_size) {
  if (a.labels.size() != data.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "assignment and data set differ in rows");
  }
  if (min_size < 1) throw Error(ErrorCode::kInvalidSpec, "min_size must be >= 1");
  std::vector<int> new_index(a.sizes.size(), 0);
  int next = 0;
  for (std::size_t c = 0; c < a.sizes.size(); ++c) {
    if (a.sizes[c] >= min_size) new_index[c] = ++next;
  }
  if (next == 0) {
    throw Error(ErrorCode::kAllClustersDropped,
                "every cluster is smaller than " + std::to_string(min_size));
  }
  ClusterAssignment out;
  out.algorithm = a.algorithm;
  out.params = a.params;
  out.params["min_cluster_size"] = std::to_string(min_size);
  out.sizes.assign(static_cast<std::size_t>(next), 0);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    const int c = new_index[static_cast<std::size_t>(a.labels[i] - 1)];
    if (c == 0) continue;
    keep.push_back(i);
    out.labels.push_back(c);
    ++out.sizes[static_cast<std::size_t>(c - 1)];
  }
  Dataset kept = data.Subset(keep);
  kept.labels = out.labels;
  return {std::move(out), std::move(kept)};
}

}  // namespace xclust
