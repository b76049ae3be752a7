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

#include "xclust/centroid.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xclust/error.hpp"

namespace xclust::centroid {
namespace {

void CheckAssignment(const Dataset& data, const ClusterAssignment& a) {
  if (a.labels.size() != data.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "assignment and data set differ in rows");
  }
}

}  // namespace

const ClusterScores& CentroidReport::For(int cluster) const {
  for (const auto& c : clusters) {
    if (c.cluster == cluster) return c;
  }
  throw Error(ErrorCode::kUnknownCluster, "no cluster " + std::to_string(cluster));
}

Eigen::VectorXd Centroid(const Dataset& data, const ClusterAssignment& a, int cluster) {
  CheckAssignment(data, a);
  const Eigen::MatrixXd x = data.FeatureBlock();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.cols());
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    if (a.labels[i] != cluster) continue;
    sum += x.row(static_cast<Eigen::Index>(i)).transpose();
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::kUnknownCluster, "no rows in cluster " + std::to_string(cluster));
  return sum / static_cast<double>(count);
}

CentroidReport DifferenceScores(const Dataset& data, const ClusterAssignment& a) {
  CheckAssignment(data, a);
  const Eigen::MatrixXd x = data.FeatureBlock();
  const auto n = static_cast<double>(x.rows());
  if (x.rows() == 0) throw Error(ErrorCode::kTooFewSamples, "empty data set");

  CentroidReport report;
  report.feature_names = data.feature_names;
  report.global_mean = x.colwise().mean().transpose();
  report.global_std =
      ((x.rowwise() - report.global_mean.transpose()).array().square().colwise().sum() / n)
          .sqrt()
          .transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    if (!(report.global_std[j] > 0.0)) {
      throw Error(ErrorCode::kDegenerateFeature,
                  "feature '" + data.feature_names[static_cast<std::size_t>(j)] + "' is constant");
    }
  }
  std::set<int> ids(a.labels.begin(), a.labels.end());
  for (int c : ids) {
    ClusterScores scores;
    scores.cluster = c;
    scores.size = static_cast<std::size_t>(std::count(a.labels.begin(), a.labels.end(), c));
    scores.centroid = Centroid(data, a, c);
    scores.scores =
        ((scores.centroid - report.global_mean).array().abs() / report.global_std.array()).matrix();
    report.clusters.push_back(std::move(scores));
  }
  return report;
}

std::vector<RankedFeature> TopKByDifference(const CentroidReport& report, int cluster,
                                            std::size_t k) {
  const ClusterScores& scores = report.For(cluster);
  std::vector<RankedFeature> ranked;
  for (Eigen::Index j = 0; j < scores.scores.size(); ++j) {
    const auto idx = static_cast<std::size_t>(j);
    ranked.push_back({idx, report.feature_names[idx], scores.scores[j]});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const RankedFeature& a, const RankedFeature& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.feature < b.feature;
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

std::size_t Overlap(std::span<const std::string> a, std::span<const std::string> b) {
  const std::set<std::string> left(a.begin(), a.end());
  const std::set<std::string> right(b.begin(), b.end());
  std::size_t count = 0;
  for (const auto& name : left) count += right.count(name);
  return count;
}

nlohmann::json ToJson(const CentroidReport& report, std::size_t top_k) {
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : report.clusters) {
    nlohmann::json scores = nlohmann::json::array();
    for (Eigen::Index j = 0; j < c.scores.size(); ++j) {
      scores.push_back({{"feature", report.feature_names[static_cast<std::size_t>(j)]},
                        {"D", c.scores[j]}});
    }
    std::vector<std::string> top;
    for (const auto& r : TopKByDifference(report, c.cluster, top_k)) top.push_back(r.name);
    std::vector<double> centroid(c.centroid.data(), c.centroid.data() + c.centroid.size());
    clusters.push_back({{"cluster", c.cluster},
                        {"size", c.size},
                        {"centroid", centroid},
                        {"scores", scores},
                        {"top_k", top}});
  }
  return nlohmann::json{{"feature_names", report.feature_names},
                        {"top_k", top_k},
                        {"clusters", clusters}};
}

}  // namespace xclust::centroid
