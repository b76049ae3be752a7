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

#ifndef XCLUST_DATASET_HPP_
#define XCLUST_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace xclust {

// Tabular data set. Rows are observations; when `has_intercept` is set the
// first column is the constant 1 and the p named features follow it.
// Labels are cluster / class indices in 1..C.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> feature_names;
  std::optional<std::vector<int>> labels;
  bool has_intercept = false;
  bool standardized = false;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t width() const { return static_cast<std::size_t>(values.cols()); }
  std::size_t num_features() const { return feature_names.size(); }
  // Column index of the first named feature.
  std::size_t first_feature_column() const { return has_intercept ? 1 : 0; }

  // Feature columns only (intercept excluded).
  Eigen::MatrixXd FeatureBlock() const;
  // Largest label value; throws LabelMissing when unlabeled.
  int NumClasses() const;
  const std::vector<int>& RequireLabels() const;
  // Copy of the given rows, in the given order.
  Dataset Subset(std::span<const std::size_t> row_indices) const;
  // Throws on non-finite values, a broken intercept column, or bad labels.
  void Validate() const;
};

struct ScalingParams {
  std::vector<double> means;
  std::vector<double> scales;
};

void to_json(nlohmann::json& j, const ScalingParams& params);
void from_json(const nlohmann::json& j, ScalingParams& params);

struct SplitSpec {
  std::vector<double> fractions;
  std::uint64_t seed = 0;
};

struct CsvOptions {
  bool has_header = true;
  std::optional<std::string> label_column;
};

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options);
Dataset ParseCsv(const std::string& text, const CsvOptions& options);
// Writes feature columns (never the intercept) and a trailing "label" column
// when labels are present.
void WriteCsv(const Dataset& data, const std::filesystem::path& path);

// Centers each feature and divides by its population standard deviation.
std::pair<Dataset, ScalingParams> Standardize(const Dataset& data);
// Applies previously fitted parameters (e.g. to an inference set).
Dataset ApplyScaling(const Dataset& data, const ScalingParams& params);
Dataset InvertScaling(const Dataset& data, const ScalingParams& params);

Dataset OneHotEncode(const Dataset& data,
                     std::span<const std::string> categorical_columns);

Dataset AddIntercept(const Dataset& data);

// Row partition with sizes given by largest-remainder rounding of
// fractions * n. Deterministic for a fixed seed.
std::vector<std::vector<std::size_t>> SplitIndices(std::size_t n,
                                                   const SplitSpec& spec);
std::vector<Dataset> Split(const Dataset& data, const SplitSpec& spec);
// Throws InvalidFractions unless every fraction is positive and they sum to
// one within 1e-12.
void ValidateSplitSpec(const SplitSpec& spec);

}  // namespace xclust

#endif  // XCLUST_DATASET_HPP_
