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

#ifndef XCLUST_PIPELINE_HPP_
#define XCLUST_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xclust/clustering.hpp"
#include "xclust/dataset.hpp"
#include "xclust/error.hpp"
#include "xclust/mlp.hpp"
#include "xclust/sfit.hpp"
#include "xclust/synthetic.hpp"

namespace xclust::pipeline {

struct InputConfig {
  // Exactly one of csv / generate.
  std::optional<std::filesystem::path> csv;
  bool has_header = true;
  std::optional<std::string> label_column;
  std::optional<fcps::GenSpec> generate;
};

struct ClusteringConfig {
  // "kmeans", "ward", or "labels" (use the input's own labels).
  std::string algorithm = "kmeans";
  std::size_t k = 2;
  std::size_t min_cluster_size = 1;
  std::size_t max_iter = 300;
  double tol = 1e-8;
  std::size_t restarts = 10;
};

struct PipelineConfig {
  InputConfig input;
  ClusteringConfig clustering;
  // train / validation / inference
  std::vector<double> split_fractions{0.7, 0.15, 0.15};
  MlpConfig mlp;
  sfit::SfitParams sfit;
  // Run SFIT on every row instead of the held-out inference split.
  bool sfit_on_all_rows = false;
  std::size_t top_k = 5;
  std::size_t centroid_top_k = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "xclust_out";
};

// Parses and validates; every problem is a ConfigError whose message starts
// with the offending stage ("input", "clustering", "split", "mlp", "sfit").
PipelineConfig ConfigFromJson(const nlohmann::json& j);
nlohmann::json ConfigToJson(const PipelineConfig& cfg);
void ValidateConfig(const PipelineConfig& cfg);

// Failure inside a stage; what() reads "<stage>: <cause>".
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.code(), stage + " stage failed: " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct ClusterOutcome {
  int cluster = 0;
  std::size_t size = 0;
  std::size_t inference_rows = 0;
  std::optional<std::string> skipped;  // reason SFIT was not run
  std::vector<std::string> sfit_top;
  std::vector<std::string> centroid_top;
  std::size_t overlap = 0;
};

struct PipelineReport {
  std::filesystem::path output_dir;
  std::vector<int> final_labels;  // after dropping small clusters
  std::optional<double> ari_vs_input_labels;
  double test_accuracy = 0.0;
  sfit::SfitReport all_clusters;
  std::vector<ClusterOutcome> clusters;
  nlohmann::json summary;
};

// standardize -> cluster -> drop small clusters -> label -> split -> train ->
// accuracy -> per-cluster SFIT -> centroid scores -> overlap. Writes
// labels.csv (+ labels.json), scaling.json, model.json, sfit_all.json,
// sfit_cluster_<c>.json, centroid.json and summary.json into output_dir.
PipelineReport RunPipeline(const PipelineConfig& cfg);

// Model file: the network plus the preprocessing needed to reuse it.
struct ModelBundle {
  MlpModel model;
  std::optional<ScalingParams> scaling;
  std::vector<std::string> feature_names;
};
void SaveModelBundle(const std::filesystem::path& path, const ModelBundle& bundle);
ModelBundle LoadModelBundle(const std::filesystem::path& path);

// Single "label" column CSV.
void WriteLabels(const std::filesystem::path& path, const std::vector<int>& labels);
std::vector<int> LoadLabels(const std::filesystem::path& path);

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json ReadJson(const std::filesystem::path& path);

}  // namespace xclust::pipeline

#endif  // XCLUST_PIPELINE_HPP_
