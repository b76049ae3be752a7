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

#ifndef XCLUST_CENTROID_HPP_
#define XCLUST_CENTROID_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "xclust/clustering.hpp"
#include "xclust/dataset.hpp"

namespace xclust::centroid {

struct ClusterScores {
  int cluster = 0;
  std::size_t size = 0;
  Eigen::VectorXd centroid;  // per-feature cluster mean
  Eigen::VectorXd scores;    // |cluster mean - global mean| / global std
};

struct CentroidReport {
  std::vector<std::string> feature_names;
  Eigen::VectorXd global_mean;
  Eigen::VectorXd global_std;  // population standard deviation
  std::vector<ClusterScores> clusters;

  const ClusterScores& For(int cluster) const;
};

// Mean of the cluster's rows over the named features (intercept excluded).
Eigen::VectorXd Centroid(const Dataset& data, const ClusterAssignment& a, int cluster);

// Difference score of every feature for every cluster. Throws
// DegenerateFeature if a feature is constant over the whole data set.
CentroidReport DifferenceScores(const Dataset& data, const ClusterAssignment& a);

struct RankedFeature {
  std::size_t feature = 0;  // 0-based index into feature_names
  std::string name;
  double score = 0.0;
};

// Features of one cluster by decreasing score, ties by feature index.
std::vector<RankedFeature> TopKByDifference(const CentroidReport& report, int cluster,
                                            std::size_t k);

// Number of names common to both lists.
std::size_t Overlap(std::span<const std::string> a, std::span<const std::string> b);

// {cluster, scores:[{feature, D}], top_k:[names]} per cluster.
nlohmann::json ToJson(const CentroidReport& report, std::size_t top_k);

}  // namespace xclust::centroid

#endif  // XCLUST_CENTROID_HPP_
