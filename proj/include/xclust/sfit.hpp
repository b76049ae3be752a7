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

#ifndef XCLUST_SFIT_HPP_
#define XCLUST_SFIT_HPP_

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "xclust/dataset.hpp"
#include "xclust/mlp.hpp"

namespace xclust::sfit {

// Sorted set of feature columns of an intercept-first input vector. Column 0
// is the intercept and can never be a member.
class FeatureSet {
 public:
  FeatureSet() = default;
  FeatureSet(std::initializer_list<std::size_t> columns);
  explicit FeatureSet(std::vector<std::size_t> columns);

  const std::vector<std::size_t>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }
  bool Contains(std::size_t column) const;
  FeatureSet With(std::size_t column) const;
  FeatureSet Without(std::size_t column) const;

  auto operator<=>(const FeatureSet&) const = default;

 private:
  std::vector<std::size_t> columns_;
};

struct SfitParams {
  double alpha = 0.05;
  // Fraction shaved off the baseline loss before comparing.
  double beta = 0.05;
  int max_order = 1;
  // At order 2, test every pair (when p <= 10) rather than only pairs that
  // contain a significant single feature.
  bool all_pairs = true;

  void Validate() const;
};

void to_json(nlohmann::json& j, const SfitParams& params);
void from_json(const nlohmann::json& j, SfitParams& params);

struct SfitEntry {
  FeatureSet features;
  // Importance: median over rows of (1-beta) L(intercept only) - L(features).
  double median = 0.0;
  // Order-statistic confidence interval of the importance median.
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  // Sign test on the statistic below; for single features it is the
  // importance itself, for interactions it is measured against `baseline`.
  double p_value = 1.0;
  bool significant = false;
  std::size_t n_positive = 0;
  std::size_t n_total = 0;
  // Sub-model the set is tested against (empty = intercept only).
  FeatureSet baseline;
  double increment_median = 0.0;

  std::size_t order() const { return features.size(); }
};

struct SfitReport {
  std::vector<SfitEntry> entries;  // grouped by order, then by feature set
  SfitParams params;
  std::optional<int> cluster;      // nullopt = all rows
  std::string model_fingerprint;
  std::vector<std::string> feature_names;  // p names; column c is name c-1

  std::vector<const SfitEntry*> EntriesOfOrder(std::size_t order) const;
  const SfitEntry* Find(const FeatureSet& features) const;
  // Significant single features, by column.
  std::vector<std::size_t> SignificantFeatures() const;
  std::string Name(const FeatureSet& features) const;
};

void to_json(nlohmann::json& j, const SfitReport& report);
SfitReport ReportFromJson(const nlohmann::json& j);

// Input with every coordinate outside `features` and the intercept zeroed.
Eigen::VectorXd Mask(const Eigen::VectorXd& x, const FeatureSet& features);
Eigen::MatrixXd MaskRows(const Eigen::MatrixXd& x, const FeatureSet& features);

// (1 - beta) L(y, model(mask(x, {}))) - L(y, model(mask(x, features))).
double Delta(const LossModel& model, const Eigen::VectorXd& x, int y,
             const FeatureSet& features, double beta);

// Tests every single feature on `inference` (which must carry the intercept
// and labels).
SfitReport FirstOrder(const LossModel& model, const Dataset& inference, const SfitParams& params);
// First-order entries followed by interactions up to params.max_order.
SfitReport HigherOrder(const LossModel& model, const Dataset& inference, const SfitParams& params);
// Either of the above (by max_order) on the rows labeled `cluster`. The loss
// stays the full multi-class loss.
SfitReport PerCluster(const LossModel& model, const Dataset& inference, int cluster,
                      const SfitParams& params);

// Minimum rows for a per-cluster run.
inline constexpr std::size_t kMinClusterRows = 20;

// Significant single features by decreasing median, ties by column.
std::vector<SfitEntry> RankFeatures(const SfitReport& report, std::size_t k);

}  // namespace xclust::sfit

#endif  // XCLUST_SFIT_HPP_
