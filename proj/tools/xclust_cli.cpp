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

// Command-line front end: generate, cluster, train, explain, centroid,
// pipeline and report. Exit codes: 0 success, 2 usage/config error,
// 1 runtime error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xclust/centroid.hpp"
#include "xclust/clustering.hpp"
#include "xclust/dataset.hpp"
#include "xclust/error.hpp"
#include "xclust/mlp.hpp"
#include "xclust/pipeline.hpp"
#include "xclust/report.hpp"
#include "xclust/rng.hpp"
#include "xclust/sfit.hpp"
#include "xclust/synthetic.hpp"

namespace {

using namespace xclust;
namespace fs = std::filesystem;

constexpr int kRuntimeError = 1;
constexpr int kConfigError = 2;

Dataset LoadFeatures(const fs::path& path) {
  CsvOptions options;
  options.has_header = true;
  Dataset d = LoadCsv(path, options);
  // A "label" column in a feature file is never a feature.
  const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), "label");
  if (it != d.feature_names.end()) {
    options.label_column = "label";
    d = LoadCsv(path, options);
    d.labels.reset();
  }
  d.Validate();
  return d;
}

Dataset Attach(Dataset d, const fs::path& labels_path) {
  auto labels = pipeline::LoadLabels(labels_path);
  if (labels.size() != d.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "labels file has " + std::to_string(labels.size()) +
                                                " rows, data has " + std::to_string(d.rows()));
  }
  d.labels = std::move(labels);
  return d;
}

int RunGenerate(const std::string& shape_name, std::size_t n, std::uint64_t seed, double noise,
                const fs::path& out) {
  const auto shape = fcps::ParseShape(shape_name);
  if (!shape) {
    std::cerr << "generate: unknown shape '" << shape_name << "'\n";
    return kConfigError;
  }
  const Dataset d = fcps::Generate({*shape, n, seed, noise});
  WriteCsv(d, out);
  std::cout << "wrote " << d.rows() << " rows of " << fcps::Info(*shape).name << "-like data to "
            << out.string() << "\n";
  return 0;
}

int RunCluster(const std::string& algo, std::size_t k, std::uint64_t seed, bool raw_scale,
               const fs::path& input, const fs::path& out) {
  Dataset d = LoadFeatures(input);
  if (!raw_scale) d = Standardize(d).first;
  ClusterAssignment a;
  if (algo == "ward") {
    a = AgglomerativeWard(d, k).assignment;
  } else if (algo == "kmeans") {
    KMeansOptions options;
    options.k = k;
    options.seed = seed;
    options.restarts = 10;
    a = KMeans(d, options).assignment;
  } else {
    std::cerr << "cluster: --algo must be kmeans or ward\n";
    return kConfigError;
  }
  pipeline::WriteLabels(out, a.labels);
  fs::path sidecar = out;
  sidecar += ".json";
  pipeline::WriteJson(sidecar, nlohmann::json(a));
  std::cout << "cluster sizes:";
  for (std::size_t s : a.sizes) std::cout << ' ' << s;
  std::cout << "\n";
  return 0;
}

int RunTrain(const fs::path& input, const fs::path& labels, const std::vector<std::size_t>& hidden,
             std::uint64_t seed, std::size_t epochs, const fs::path& out) {
  const Dataset raw = Attach(LoadFeatures(input), labels);
  auto [standardized, scaling] = Standardize(raw);
  const Dataset d = AddIntercept(standardized);
  const auto parts = SplitIndices(d.rows(), SplitSpec{{0.85, 0.15}, Rng::Derive(seed, 1)});
  MlpConfig cfg;
  cfg.hidden_sizes = hidden;
  cfg.max_epochs = epochs;
  cfg.seed = Rng::Derive(seed, 2);
  const MlpModel model = Train(d.Subset(parts[0]), d.Subset(parts[1]), cfg);
  pipeline::SaveModelBundle(out, {model, scaling, raw.feature_names});
  std::cout << "epochs run " << model.log.validation_loss.size() << ", best epoch "
            << model.log.best_epoch + 1 << ", validation accuracy "
            << Accuracy(model, d.Subset(parts[1])) << "\n";
  return 0;
}

int RunExplain(const fs::path& model_path, const fs::path& input, const fs::path& labels,
               std::optional<int> cluster, const sfit::SfitParams& params, const fs::path& out) {
  params.Validate();
  const auto bundle = pipeline::LoadModelBundle(model_path);
  Dataset d = Attach(LoadFeatures(input), labels);
  if (bundle.scaling) d = ApplyScaling(d, *bundle.scaling);
  d = AddIntercept(d);
  const sfit::SfitReport report =
      cluster ? sfit::PerCluster(bundle.model, d, *cluster, params)
              : (params.max_order > 1 ? sfit::HigherOrder(bundle.model, d, params)
                                      : sfit::FirstOrder(bundle.model, d, params));
  pipeline::WriteJson(out, nlohmann::json(report));
  std::cout << report::RenderSfitTable(report);
  return 0;
}

int RunCentroid(const fs::path& input, const fs::path& labels, std::size_t top,
                const std::optional<fs::path>& out) {
  const Dataset d = Attach(LoadFeatures(input), labels);
  const auto a = ClusterAssignment::FromLabels(*d.labels);
  // Keep the user's label numbering rather than first-appearance order.
  ClusterAssignment given = a;
  given.labels = *d.labels;
  const auto scores = centroid::DifferenceScores(d, given);
  const nlohmann::json j = centroid::ToJson(scores, top);
  if (out) pipeline::WriteJson(*out, j);
  std::cout << report::RenderCentroidTables(j);
  return 0;
}

int RunPipelineCommand(const fs::path& config_path) {
  pipeline::PipelineConfig cfg;
  try {
    cfg = pipeline::ConfigFromJson(pipeline::ReadJson(config_path));
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  const auto result = pipeline::RunPipeline(cfg);
  std::cout << "test accuracy " << result.test_accuracy << "\n";
  if (result.ari_vs_input_labels) std::cout << "ARI vs input labels " << *result.ari_vs_input_labels << "\n";
  for (const auto& c : result.clusters) {
    std::cout << "cluster " << c.cluster << " (" << c.size << " rows): ";
    if (c.skipped) {
      std::cout << "skipped, " << *c.skipped << "\n";
      continue;
    }
    for (const auto& name : c.sfit_top) std::cout << name << ' ';
    std::cout << "| overlap with centroid top " << cfg.centroid_top_k << ": " << c.overlap << "\n";
  }
  std::cout << "reports written to " << cfg.output_dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explain clusters with a classifier and single-feature significance tests"};
  app.require_subcommand(1);

  std::string shape;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string out;
  auto* generate = app.add_subcommand("generate", "Write a labeled FCPS-like data set");
  generate->add_option("--shape", shape, "Shape name (Atom, Chainlink, EngyTime, ...)")->required();
  generate->add_option("--n", n, "Number of points (0 = shape default)");
  generate->add_option("--seed", seed, "Random seed")->required();
  generate->add_option("--noise", noise, "Gaussian jitter std-dev");
  generate->add_option("--out", out, "Output CSV")->required();

  std::string algo;
  std::size_t k = 0;
  std::string input;
  bool raw_scale = false;
  auto* cluster = app.add_subcommand("cluster", "Cluster a CSV and write labels");
  cluster->add_option("--algo", algo, "kmeans or ward")->required()->check(CLI::IsMember({"kmeans", "ward"}));
  cluster->add_option("--k", k, "Number of clusters")->required();
  cluster->add_option("--input", input, "Feature CSV")->required();
  cluster->add_option("--out", out, "Label CSV to write")->required();
  cluster->add_option("--seed", seed, "Seed for k-means++");
  cluster->add_flag("--raw", raw_scale, "Do not standardize features first");

  std::string labels;
  std::vector<std::size_t> hidden{50, 25, 10};
  std::size_t epochs = 50;
  auto* train = app.add_subcommand("train", "Train the cluster classifier");
  train->add_option("--input", input, "Feature CSV")->required();
  train->add_option("--labels", labels, "Label CSV")->required();
  train->add_option("--hidden", hidden, "Hidden layer widths")->delimiter(',');
  train->add_option("--seed", seed, "Random seed")->required();
  train->add_option("--epochs", epochs, "Maximum epochs");
  train->add_option("--out", out, "Model file to write")->required();

  std::string model;
  std::optional<int> cluster_id;
  sfit::SfitParams params;
  auto* explain = app.add_subcommand("explain", "Run SFIT on a trained model");
  explain->add_option("--model", model, "Model file")->required();
  explain->add_option("--input", input, "Feature CSV")->required();
  explain->add_option("--labels", labels, "Label CSV")->required();
  explain->add_option("--cluster", cluster_id, "Restrict to one cluster");
  explain->add_option("--alpha", params.alpha, "Significance level");
  explain->add_option("--beta", params.beta, "Baseline-loss margin");
  explain->add_option("--order", params.max_order, "Highest interaction order")->check(CLI::Range(1, 3));
  explain->add_option("--out", out, "Report JSON to write")->required();

  std::size_t top = 10;
  std::string centroid_out;
  auto* centroid = app.add_subcommand("centroid", "Centroid difference scores");
  centroid->add_option("--input", input, "Feature CSV")->required();
  centroid->add_option("--labels", labels, "Label CSV")->required();
  centroid->add_option("--top", top, "Features to list per cluster");
  centroid->add_option("--out", centroid_out, "Optional JSON output");

  std::string config;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "Run the whole method from a JSON config");
  pipeline_cmd->add_option("--config", config, "Config JSON")->required();

  std::string dir;
  auto* report_cmd = app.add_subcommand("report", "Render a pipeline output directory as tables");
  report_cmd->add_option("dir", dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*generate) return RunGenerate(shape, n, seed, noise, out);
    if (*cluster) return RunCluster(algo, k, seed, raw_scale, input, out);
    if (*train) return RunTrain(input, labels, hidden, seed, epochs, out);
    if (*explain) return RunExplain(model, input, labels, cluster_id, params, out);
    if (*centroid) {
      return RunCentroid(input, labels, top,
                         centroid_out.empty() ? std::nullopt : std::optional<fs::path>(centroid_out));
    }
    if (*pipeline_cmd) return RunPipelineCommand(config);
    if (*report_cmd) {
      std::cout << report::RenderDirectory(dir);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfigError ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
