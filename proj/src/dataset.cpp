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

#include "xclust/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "xclust/error.hpp"
#include "xclust/rng.hpp"

namespace xclust {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(Trim(line.substr(start)));
      break;
    }
    cells.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

bool ParseDouble(std::string_view cell, double& out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto result = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return result.ec == std::errc() && result.ptr == cell.data() + cell.size() &&
         std::isfinite(out);
}

std::string FormatValue(double v) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, result.ptr);
}

}  // namespace

Eigen::MatrixXd Dataset::FeatureBlock() const {
  const auto first = static_cast<Eigen::Index>(first_feature_column());
  return values.rightCols(values.cols() - first);
}

const std::vector<int>& Dataset::RequireLabels() const {
  if (!labels) throw Error(ErrorCode::kLabelMissing, "dataset has no labels");
  return *labels;
}

int Dataset::NumClasses() const {
  const auto& y = RequireLabels();
  return y.empty() ? 0 : *std::max_element(y.begin(), y.end());
}

Dataset Dataset::Subset(std::span<const std::size_t> row_indices) const {
  Dataset out;
  out.values.resize(static_cast<Eigen::Index>(row_indices.size()), values.cols());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    if (row_indices[i] >= rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "row index out of range");
    }
    out.values.row(static_cast<Eigen::Index>(i)) =
        values.row(static_cast<Eigen::Index>(row_indices[i]));
  }
  out.feature_names = feature_names;
  if (labels) {
    std::vector<int> sub;
    sub.reserve(row_indices.size());
    for (std::size_t r : row_indices) sub.push_back((*labels)[r]);
    out.labels = std::move(sub);
  }
  out.has_intercept = has_intercept;
  out.standardized = standardized;
  return out;
}

void Dataset::Validate() const {
  if (width() != num_features() + (has_intercept ? 1 : 0)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matrix width does not match feature names");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::kParseError, "dataset contains non-finite values");
  }
  if (has_intercept && rows() > 0 && !(values.col(0).array() == 1.0).all()) {
    throw Error(ErrorCode::kDimensionMismatch, "intercept column is not all ones");
  }
  if (labels) {
    if (labels->size() != rows()) {
      throw Error(ErrorCode::kLengthMismatch, "labels length differs from rows");
    }
    for (int y : *labels) {
      if (y < 1) throw Error(ErrorCode::kBadLabel, "labels must be >= 1");
    }
  }
}

void to_json(nlohmann::json& j, const ScalingParams& params) {
  j = nlohmann::json{{"means", params.means}, {"scales", params.scales}};
}

void from_json(const nlohmann::json& j, ScalingParams& params) {
  j.at("means").get_to(params.means);
  j.at("scales").get_to(params.scales);
  if (params.means.size() != params.scales.size()) {
    throw Error(ErrorCode::kParseError, "scaling params: means/scales length differ");
  }
}

Dataset ParseCsv(const std::string& text, const CsvOptions& options) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<std::string_view>> rows;
  std::vector<std::string> lines;
  std::size_t line_number = 0;
  std::vector<std::size_t> line_numbers;
  while (std::getline(in, line)) {
    ++line_number;
    if (Trim(line).empty()) continue;
    lines.push_back(line);
    line_numbers.push_back(line_number);
  }
  if (lines.empty()) throw Error(ErrorCode::kParseError, "empty CSV input");

  std::size_t first_data = 0;
  if (options.has_header) {
    for (auto cell : SplitLine(lines[0])) header.emplace_back(cell);
    first_data = 1;
    if (lines.size() == 1) throw Error(ErrorCode::kParseError, "CSV has no data rows");
  } else {
    const std::size_t cols = SplitLine(lines[0]).size();
    for (std::size_t c = 0; c < cols; ++c) header.push_back("x" + std::to_string(c + 1));
  }

  std::optional<std::size_t> label_index;
  if (options.label_column) {
    const auto it = std::find(header.begin(), header.end(), *options.label_column);
    if (it == header.end()) {
      throw Error(ErrorCode::kMissingColumn, "no column named '" + *options.label_column + "'");
    }
    label_index = static_cast<std::size_t>(it - header.begin());
  }

  const std::size_t n = lines.size() - first_data;
  const std::size_t p = header.size() - (label_index ? 1 : 0);
  Dataset data;
  data.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::vector<int> labels;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (label_index && c == *label_index) continue;
    data.feature_names.push_back(header[c]);
  }

  for (std::size_t r = 0; r < n; ++r) {
    const auto cells = SplitLine(lines[first_data + r]);
    const std::size_t lineno = line_numbers[first_data + r];
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " cells, found " +
                      std::to_string(cells.size()));
    }
    std::size_t out_col = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      if (!ParseDouble(cells[c], value)) {
        throw Error(ErrorCode::kParseError,
                    "line " + std::to_string(lineno) + ", column '" + header[c] +
                        "': cannot parse '" + std::string(cells[c]) + "'");
      }
      if (label_index && c == *label_index) {
        if (value != std::floor(value) || value < 1.0 || value > 1e9) {
          throw Error(ErrorCode::kParseError,
                      "line " + std::to_string(lineno) +
                          ": label must be a positive integer, got '" +
                          std::string(cells[c]) + "'");
        }
        labels.push_back(static_cast<int>(value));
      } else {
        data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(out_col++)) = value;
      }
    }
  }
  if (label_index) data.labels = std::move(labels);
  return data;
}

Dataset LoadCsv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseCsv(buffer.str(), options);
}

void WriteCsv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (std::size_t j = 0; j < data.feature_names.size(); ++j) {
    if (j > 0) out << ',';
    out << data.feature_names[j];
  }
  if (data.labels) out << (data.feature_names.empty() ? "" : ",") << "label";
  out << '\n';
  const std::size_t first = data.first_feature_column();
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t j = 0; j < data.num_features(); ++j) {
      if (j > 0) out << ',';
      out << FormatValue(data.values(static_cast<Eigen::Index>(r),
                                     static_cast<Eigen::Index>(first + j)));
    }
    if (data.labels) out << (data.num_features() == 0 ? "" : ",") << (*data.labels)[r];
    out << '\n';
  }
}

std::pair<Dataset, ScalingParams> Standardize(const Dataset& data) {
  if (data.has_intercept) {
    throw Error(ErrorCode::kInterceptAlreadyPresent,
                "standardize before adding the intercept");
  }
  const std::size_t n = data.rows();
  if (n < 2) throw Error(ErrorCode::kTooFewSamples, "standardize needs n >= 2");
  ScalingParams params;
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    const auto col = data.values.col(static_cast<Eigen::Index>(j));
    const double mean = col.mean();
    const double var = (col.array() - mean).square().sum() / static_cast<double>(n);
    const double scale = std::sqrt(var);
    if (!(scale > 0.0)) {
      throw Error(ErrorCode::kDegenerateFeature,
                  "feature '" + data.feature_names[j] + "' is constant");
    }
    params.means.push_back(mean);
    params.scales.push_back(scale);
  }
  return {ApplyScaling(data, params), params};
}

Dataset ApplyScaling(const Dataset& data, const ScalingParams& params) {
  if (params.means.size() != data.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch, "scaling params do not match feature count");
  }
  Dataset out = data;
  const std::size_t first = data.first_feature_column();
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    auto col = out.values.col(static_cast<Eigen::Index>(first + j));
    col = (col.array() - params.means[j]) / params.scales[j];
  }
  out.standardized = true;
  return out;
}

Dataset InvertScaling(const Dataset& data, const ScalingParams& params) {
  if (params.means.size() != data.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch, "scaling params do not match feature count");
  }
  Dataset out = data;
  const std::size_t first = data.first_feature_column();
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    auto col = out.values.col(static_cast<Eigen::Index>(first + j));
    col = col.array() * params.scales[j] + params.means[j];
  }
  out.standardized = false;
  return out;
}

Dataset OneHotEncode(const Dataset& data,
                     std::span<const std::string> categorical_columns) {
  const std::size_t first = data.first_feature_column();
  std::vector<bool> categorical(data.num_features(), false);
  for (const auto& name : categorical_columns) {
    const auto it = std::find(data.feature_names.begin(), data.feature_names.end(), name);
    if (it == data.feature_names.end()) {
      throw Error(ErrorCode::kMissingColumn, "no column named '" + name + "'");
    }
    categorical[static_cast<std::size_t>(it - data.feature_names.begin())] = true;
  }

  std::vector<Eigen::VectorXd> columns;
  Dataset out;
  if (data.has_intercept) columns.push_back(data.values.col(0));
  for (std::size_t j = 0; j < data.num_features(); ++j) {
    const Eigen::VectorXd col = data.values.col(static_cast<Eigen::Index>(first + j));
    if (!categorical[j]) {
      columns.push_back(col);
      out.feature_names.push_back(data.feature_names[j]);
      continue;
    }
    std::vector<double> levels(col.data(), col.data() + col.size());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double level : levels) {
      columns.push_back((col.array() == level).cast<double>().matrix());
      out.feature_names.push_back(data.feature_names[j] + "_" + FormatValue(level));
    }
  }
  out.values.resize(data.values.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.values.col(static_cast<Eigen::Index>(c)) = columns[c];
  }
  out.labels = data.labels;
  out.has_intercept = data.has_intercept;
  out.standardized = false;
  return out;
}

Dataset AddIntercept(const Dataset& data) {
  if (data.has_intercept) {
    throw Error(ErrorCode::kInterceptAlreadyPresent, "intercept already present");
  }
  Dataset out = data;
  out.values.resize(data.values.rows(), data.values.cols() + 1);
  out.values.col(0).setOnes();
  out.values.rightCols(data.values.cols()) = data.values;
  out.has_intercept = true;
  return out;
}

void ValidateSplitSpec(const SplitSpec& spec) {
  if (spec.fractions.empty()) {
    throw Error(ErrorCode::kInvalidFractions, "no split fractions given");
  }
  double sum = 0.0;
  for (double f : spec.fractions) {
    if (!(f > 0.0)) throw Error(ErrorCode::kInvalidFractions, "fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::kInvalidFractions,
                "fractions sum to " + FormatValue(sum) + ", expected 1");
  }
}

std::vector<std::vector<std::size_t>> SplitIndices(std::size_t n, const SplitSpec& spec) {
  ValidateSplitSpec(spec);
  const std::size_t parts = spec.fractions.size();
  if (n < parts) {
    throw Error(ErrorCode::kInvalidFractions, "fewer rows than split parts");
  }
  // Largest-remainder apportionment. Quotas within 1e-9 of an integer are
  // snapped so that exact fractions such as 480/682 are not lost to rounding.
  std::vector<std::size_t> sizes(parts);
  std::vector<double> remainders(parts);
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < parts; ++k) {
    double quota = spec.fractions[k] * static_cast<double>(n);
    const double nearest = std::round(quota);
    if (std::abs(quota - nearest) < 1e-9) quota = nearest;
    sizes[k] = static_cast<std::size_t>(std::floor(quota));
    remainders[k] = quota - std::floor(quota);
    assigned += sizes[k];
  }
  std::vector<std::size_t> order(parts);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % parts]];

  std::vector<std::size_t> permutation(n);
  std::iota(permutation.begin(), permutation.end(), 0);
  Rng rng(spec.seed);
  rng.Shuffle(permutation);

  std::vector<std::vector<std::size_t>> out(parts);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts; ++k) {
    out[k].assign(permutation.begin() + static_cast<std::ptrdiff_t>(offset),
                  permutation.begin() + static_cast<std::ptrdiff_t>(offset + sizes[k]));
    offset += sizes[k];
  }
  return out;
}

std::vector<Dataset> Split(const Dataset& data, const SplitSpec& spec) {
  std::vector<Dataset> out;
  for (const auto& rows : SplitIndices(data.rows(), spec)) out.push_back(data.Subset(rows));
  return out;
}

}  // namespace xclust
