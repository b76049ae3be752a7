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

#ifndef XCLUST_CLUSTERING_HPP_
#define XCLUST_CLUSTERING_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xclust/dataset.hpp"

namespace xclust {

// Partition of the rows of a data set into clusters labeled 1..C, numbered
// in order of first appearance.
struct ClusterAssignment {
  std::vector<int> labels;
  std::vector<std::size_t> sizes;  // sizes[c-1] = rows in cluster c
  std::string algorithm;
  std::map<std::string, std::string> params;

  std::size_t num_clusters() const { return sizes.size(); }

  // Builds an assignment from arbitrary integer labels, renumbering them
  // 1..C by order of first appearance.
  static ClusterAssignment FromLabels(std::span<const int> raw, std::string algorithm = "given");
};

void to_json(nlohmann::json& j, const ClusterAssignment& a);

struct KMeansOptions {
  std::size_t k = 2;
  std::uint64_t seed = 0;
  std::size_t max_iter = 300;
  double tol = 1e-8;
  // Independent k-means++ restarts; the lowest-inertia run is kept.
  std::size_t restarts = 1;
};

struct KMeansResult {
  ClusterAssignment assignment;
  Eigen::MatrixXd centroids;  // k x p, rows follow the assignment's labels
  double inertia = 0.0;
  // Within-cluster sum of squares after every assignment step of the kept run.
  std::vector<double> inertia_trace;
  std::size_t iterations = 0;
};

// Lloyd iterations from a k-means++ start. The intercept column, when
// present, does not enter distances.
KMeansResult KMeans(const Dataset& data, const KMeansOptions& options);

struct WardResult {
  ClusterAssignment assignment;
  // Increase in within-cluster sum of squares for each merge, in merge order.
  std::vector<double> merge_costs;
};

// Bottom-up agglomeration with Ward linkage on Euclidean distance, stopped
// when k clusters remain. Ties go to the lexicographically smallest pair of
// cluster representatives. O(n^3) time, O(n^2) memory.
WardResult AgglomerativeWard(const Dataset& data, std::size_t k);

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b);
double AdjustedRandIndex(const ClusterAssignment& a, const ClusterAssignment& b);

// Removes rows of clusters smaller than `min_size` and renumbers the
// survivors 1..C' keeping their relative order. Labels on the returned data
// set are the new cluster indices.
std::pair<ClusterAssignment, Dataset> DropSmallClusters(const ClusterAssignment& a,
                                                        const Dataset& data,
                                                        std::size_t min_size);

}  // namespace xclust

#endif  // XCLUST_CLUSTERING_HPP_
