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

#include "xclust/pipeline.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "xclust/centroid.hpp"
#include "xclust/rng.hpp"

namespace xclust::pipeline {
namespace {

// Stream ids for seeds derived from the top-level seed.
constexpr std::uint64_t kGeneratorStream = 0;
constexpr std::uint64_t kSplitStream = 1;
constexpr std::uint64_t kMlpStream = 2;
constexpr std::uint64_t kKMeansStream = 3;

[[noreturn]] void ConfigFail(const std::string& stage, const std::string& message) {
  throw Error(ErrorCode::kConfigError, stage + ": " + message);
}

template <typename F>
auto Stage(const std::string& name, F&& body) {
  try {
    return body();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  } catch (const std::exception& e) {
    throw StageError(name, Error(ErrorCode::kIoError, e.what()));
  }
}

template <typename T>
T Field(const nlohmann::json& j, const char* key, const T& fallback, const std::string& stage) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    ConfigFail(stage, std::string("field '") + key + "' has the wrong type");
  }
}

void CheckKeys(const nlohmann::json& j, const std::set<std::string>& allowed,
               const std::string& stage) {
  if (!j.is_object()) ConfigFail(stage, "expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) ConfigFail(stage, "unknown field '" + key + "'");
  }
}

std::vector<std::string> Names(const sfit::SfitReport& report, const std::vector<sfit::SfitEntry>& entries) {
  std::vector<std::string> out;
  for (const auto& e : entries) out.push_back(report.Name(e.features));
  return out;
}

}  // namespace

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

void WriteLabels(const std::filesystem::path& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "label\n";
  for (int y : labels) out << y << '\n';
}

std::vector<int> LoadLabels(const std::filesystem::path& path) {
  CsvOptions options;
  options.has_header = true;
  Dataset d = LoadCsv(path, options);
  if (d.num_features() < 1) throw Error(ErrorCode::kParseError, path.string() + ": no columns");
  const auto it = std::find(d.feature_names.begin(), d.feature_names.end(), "label");
  const auto col = static_cast<Eigen::Index>(it == d.feature_names.end() ? 0 : it - d.feature_names.begin());
  std::vector<int> labels;
  for (Eigen::Index r = 0; r < d.values.rows(); ++r) {
    const double v = d.values(r, col);
    if (v != std::floor(v) || v < 1.0) {
      throw Error(ErrorCode::kParseError, path.string() + ": labels must be positive integers");
    }
    labels.push_back(static_cast<int>(v));
  }
  return labels;
}

void SaveModelBundle(const std::filesystem::path& path, const ModelBundle& bundle) {
  nlohmann::json j = bundle.model;
  j["feature_names"] = bundle.feature_names;
  j["scaling"] = bundle.scaling ? nlohmann::json(*bundle.scaling) : nlohmann::json();
  WriteJson(path, j);
}

ModelBundle LoadModelBundle(const std::filesystem::path& path) {
  const nlohmann::json j = ReadJson(path);
  ModelBundle bundle;
  try {
    bundle.model = j.get<MlpModel>();
    bundle.feature_names = j.value("feature_names", std::vector<std::string>{});
    if (j.contains("scaling") && !j.at("scaling").is_null()) {
      bundle.scaling = j.at("scaling").get<ScalingParams>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  return bundle;
}

PipelineConfig ConfigFromJson(const nlohmann::json& j) {
  CheckKeys(j, {"seed", "input", "clustering", "split", "mlp", "sfit", "top_k", "centroid_top_k",
                "output_dir"},
            "config");
  PipelineConfig cfg;
  if (!j.contains("seed")) ConfigFail("config", "'seed' is required");
  cfg.seed = Field<std::uint64_t>(j, "seed", 0, "config");
  cfg.output_dir = Field<std::string>(j, "output_dir", cfg.output_dir.string(), "config");
  cfg.top_k = Field<std::size_t>(j, "top_k", cfg.top_k, "config");
  cfg.centroid_top_k = Field<std::size_t>(j, "centroid_top_k", cfg.centroid_top_k, "config");

  if (!j.contains("input")) ConfigFail("input", "'input' is required");
  const auto& in = j.at("input");
  CheckKeys(in, {"csv", "has_header", "label_column", "generate"}, "input");
  if (in.contains("csv")) cfg.input.csv = Field<std::string>(in, "csv", "", "input");
  cfg.input.has_header = Field<bool>(in, "has_header", true, "input");
  if (in.contains("label_column") && !in.at("label_column").is_null()) {
    cfg.input.label_column = Field<std::string>(in, "label_column", "", "input");
  }
  if (in.contains("generate")) {
    const auto& g = in.at("generate");
    CheckKeys(g, {"shape", "n", "seed", "noise"}, "input");
    fcps::GenSpec spec;
    const auto shape_name = Field<std::string>(g, "shape", "", "input");
    const auto shape = fcps::ParseShape(shape_name);
    if (!shape) ConfigFail("input", "unknown shape '" + shape_name + "'");
    spec.shape = *shape;
    spec.n = Field<std::size_t>(g, "n", 0, "input");
    spec.seed = Field<std::uint64_t>(g, "seed", Rng::Derive(cfg.seed, kGeneratorStream), "input");
    spec.noise = Field<double>(g, "noise", 0.0, "input");
    cfg.input.generate = spec;
  }

  if (j.contains("clustering")) {
    const auto& c = j.at("clustering");
    CheckKeys(c, {"algorithm", "k", "min_cluster_size", "max_iter", "tol", "restarts"}, "clustering");
    cfg.clustering.algorithm = Field<std::string>(c, "algorithm", cfg.clustering.algorithm, "clustering");
    cfg.clustering.k = Field<std::size_t>(c, "k", cfg.clustering.k, "clustering");
    cfg.clustering.min_cluster_size =
        Field<std::size_t>(c, "min_cluster_size", cfg.clustering.min_cluster_size, "clustering");
    cfg.clustering.max_iter = Field<std::size_t>(c, "max_iter", cfg.clustering.max_iter, "clustering");
    cfg.clustering.tol = Field<double>(c, "tol", cfg.clustering.tol, "clustering");
    cfg.clustering.restarts = Field<std::size_t>(c, "restarts", cfg.clustering.restarts, "clustering");
  }

  if (j.contains("split")) {
    CheckKeys(j.at("split"), {"fractions"}, "split");
    cfg.split_fractions = Field<std::vector<double>>(j.at("split"), "fractions", cfg.split_fractions, "split");
  }

  cfg.mlp.seed = Rng::Derive(cfg.seed, kMlpStream);
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    CheckKeys(m, {"hidden_sizes", "activation", "max_epochs", "batch_size", "learning_rate",
                  "adam_beta1", "adam_beta2", "adam_epsilon", "early_stopping_patience", "seed"},
              "mlp");
    try {
      const std::uint64_t derived = cfg.mlp.seed;
      cfg.mlp = m.get<MlpConfig>();
      if (!m.contains("seed")) cfg.mlp.seed = derived;
    } catch (const nlohmann::json::exception&) {
      ConfigFail("mlp", "malformed field");
    } catch (const Error& e) {
      ConfigFail("mlp", e.what());
    }
  }

  if (j.contains("sfit")) {
    const auto& s = j.at("sfit");
    CheckKeys(s, {"alpha", "beta", "max_order", "all_pairs", "on_all_rows"}, "sfit");
    try {
      cfg.sfit = s.get<sfit::SfitParams>();
    } catch (const nlohmann::json::exception&) {
      ConfigFail("sfit", "malformed field");
    }
    cfg.sfit_on_all_rows = Field<bool>(s, "on_all_rows", false, "sfit");
  }
  ValidateConfig(cfg);
  return cfg;
}

nlohmann::json ConfigToJson(const PipelineConfig& cfg) {
  nlohmann::json input;
  if (cfg.input.csv) {
    input["csv"] = cfg.input.csv->string();
    input["has_header"] = cfg.input.has_header;
    input["label_column"] = cfg.input.label_column ? nlohmann::json(*cfg.input.label_column) : nlohmann::json();
  }
  if (cfg.input.generate) {
    const auto& g = *cfg.input.generate;
    input["generate"] = {{"shape", fcps::Info(g.shape).name},
                         {"n", g.n == 0 ? fcps::Info(g.shape).default_n : g.n},
                         {"seed", g.seed},
                         {"noise", g.noise}};
  }
  nlohmann::json sfit_json = cfg.sfit;
  sfit_json["on_all_rows"] = cfg.sfit_on_all_rows;
  return nlohmann::json{{"seed", cfg.seed},
                        {"input", input},
                        {"clustering",
                         {{"algorithm", cfg.clustering.algorithm},
                          {"k", cfg.clustering.k},
                          {"min_cluster_size", cfg.clustering.min_cluster_size},
                          {"max_iter", cfg.clustering.max_iter},
                          {"tol", cfg.clustering.tol},
                          {"restarts", cfg.clustering.restarts}}},
                        {"split", {{"fractions", cfg.split_fractions}}},
                        {"mlp", cfg.mlp},
                        {"sfit", sfit_json},
                        {"top_k", cfg.top_k},
                        {"centroid_top_k", cfg.centroid_top_k},
                        {"output_dir", cfg.output_dir.string()}};
}

void ValidateConfig(const PipelineConfig& cfg) {
  if (cfg.input.csv.has_value() == cfg.input.generate.has_value()) {
    ConfigFail("input", "give exactly one of 'csv' or 'generate'");
  }
  const auto& c = cfg.clustering;
  if (c.algorithm != "kmeans" && c.algorithm != "ward" && c.algorithm != "labels") {
    ConfigFail("clustering", "algorithm must be kmeans, ward or labels");
  }
  if (c.algorithm != "labels" && c.k < 1) ConfigFail("clustering", "k must be >= 1");
  if (c.min_cluster_size < 1) ConfigFail("clustering", "min_cluster_size must be >= 1");
  if (c.algorithm == "labels" && cfg.input.csv && !cfg.input.label_column) {
    ConfigFail("clustering", "algorithm 'labels' needs input.label_column");
  }
  if (cfg.split_fractions.size() != 3) {
    ConfigFail("split", "fractions must list train, validation and inference shares");
  }
  try {
    ValidateSplitSpec(SplitSpec{cfg.split_fractions, 0});
  } catch (const Error& e) {
    ConfigFail("split", e.what());
  }
  try {
    cfg.mlp.Validate();
  } catch (const Error& e) {
    ConfigFail("mlp", e.what());
  }
  try {
    cfg.sfit.Validate();
  } catch (const Error& e) {
    ConfigFail("sfit", e.what());
  }
  if (cfg.top_k < 1) ConfigFail("config", "top_k must be >= 1");
}

PipelineReport RunPipeline(const PipelineConfig& cfg) {
  ValidateConfig(cfg);
  PipelineReport result;
  result.output_dir = cfg.output_dir;

  const Dataset raw = Stage("input", [&] {
    if (cfg.input.generate) return fcps::Generate(*cfg.input.generate);
    CsvOptions options{cfg.input.has_header, cfg.input.label_column};
    Dataset d = LoadCsv(*cfg.input.csv, options);
    d.Validate();
    return d;
  });

  auto [standardized, scaling] = Stage("standardize", [&] { return Standardize(raw); });

  const ClusterAssignment clustered = Stage("clustering", [&] {
    const auto& c = cfg.clustering;
    if (c.algorithm == "labels") {
      ClusterAssignment a = ClusterAssignment::FromLabels(raw.RequireLabels(), "labels");
      return a;
    }
    if (c.algorithm == "ward") return AgglomerativeWard(standardized, c.k).assignment;
    KMeansOptions options;
    options.k = c.k;
    options.seed = Rng::Derive(cfg.seed, kKMeansStream);
    options.max_iter = c.max_iter;
    options.tol = c.tol;
    options.restarts = c.restarts;
    return KMeans(standardized, options).assignment;
  });
  if (raw.labels && cfg.clustering.algorithm != "labels") {
    result.ari_vs_input_labels =
        AdjustedRandIndex(std::span<const int>(clustered.labels), std::span<const int>(*raw.labels));
  }

  auto [assignment, labeled] = Stage("drop_small_clusters", [&] {
    Dataset unlabeled = standardized;
    unlabeled.labels.reset();
    return DropSmallClusters(clustered, unlabeled, cfg.clustering.min_cluster_size);
  });
  result.final_labels = assignment.labels;
  const Dataset with_intercept = AddIntercept(labeled);

  const auto parts = Stage("split", [&] {
    return SplitIndices(with_intercept.rows(),
                        SplitSpec{cfg.split_fractions, Rng::Derive(cfg.seed, kSplitStream)});
  });
  const Dataset train = with_intercept.Subset(parts[0]);
  const Dataset validation = with_intercept.Subset(parts[1]);
  const Dataset inference = cfg.sfit_on_all_rows ? with_intercept : with_intercept.Subset(parts[2]);
  const Dataset test = with_intercept.Subset(parts[2]);

  const MlpModel model = Stage("train", [&] { return Train(train, validation, cfg.mlp); });
  result.test_accuracy = Stage("evaluate", [&] { return Accuracy(model, test); });

  result.all_clusters = Stage("sfit", [&] {
    return cfg.sfit.max_order > 1 ? sfit::HigherOrder(model, inference, cfg.sfit)
                                  : sfit::FirstOrder(model, inference, cfg.sfit);
  });

  const centroid::CentroidReport centroids =
      Stage("centroid", [&] { return centroid::DifferenceScores(labeled, assignment); });

  std::vector<sfit::SfitReport> per_cluster;
  const auto& inference_labels = inference.RequireLabels();
  for (std::size_t c = 1; c <= assignment.num_clusters(); ++c) {
    ClusterOutcome outcome;
    outcome.cluster = static_cast<int>(c);
    outcome.size = assignment.sizes[c - 1];
    outcome.inference_rows = static_cast<std::size_t>(
        std::count(inference_labels.begin(), inference_labels.end(), outcome.cluster));
    for (const auto& r : centroid::TopKByDifference(centroids, outcome.cluster, cfg.centroid_top_k)) {
      outcome.centroid_top.push_back(r.name);
    }
    try {
      sfit::SfitReport report = sfit::PerCluster(model, inference, outcome.cluster, cfg.sfit);
      outcome.sfit_top = Names(report, sfit::RankFeatures(report, cfg.top_k));
      outcome.overlap = centroid::Overlap(outcome.sfit_top, outcome.centroid_top);
      per_cluster.push_back(std::move(report));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooFewSamples && e.code() != ErrorCode::kUnknownCluster) {
        throw StageError("sfit", e);
      }
      outcome.skipped = e.what();
    }
    result.clusters.push_back(std::move(outcome));
  }

  Stage("write", [&] {
    std::filesystem::create_directories(cfg.output_dir);
    const auto& dir = cfg.output_dir;
    WriteLabels(dir / "labels.csv", clustered.labels);
    WriteJson(dir / "labels.json", nlohmann::json(clustered));
    WriteJson(dir / "scaling.json", nlohmann::json(scaling));
    SaveModelBundle(dir / "model.json", {model, scaling, raw.feature_names});
    WriteJson(dir / "sfit_all.json", nlohmann::json(result.all_clusters));
    for (const auto& report : per_cluster) {
      WriteJson(dir / ("sfit_cluster_" + std::to_string(*report.cluster) + ".json"),
                nlohmann::json(report));
    }
    WriteJson(dir / "centroid.json", centroid::ToJson(centroids, cfg.centroid_top_k));

    nlohmann::json clusters = nlohmann::json::array();
    double overlap_sum = 0.0;
    std::size_t overlap_count = 0;
    for (const auto& o : result.clusters) {
      nlohmann::json entry{{"cluster", o.cluster},
                           {"size", o.size},
                           {"inference_rows", o.inference_rows},
                           {"sfit_top", o.sfit_top},
                           {"centroid_top", o.centroid_top},
                           {"overlap", o.overlap}};
      if (o.skipped) {
        entry["skipped"] = *o.skipped;
      } else {
        overlap_sum += static_cast<double>(o.overlap);
        ++overlap_count;
      }
      clusters.push_back(std::move(entry));
    }
    nlohmann::json interactions = nlohmann::json::array();
    for (const auto& e : result.all_clusters.entries) {
      if (e.order() < 2) continue;
      interactions.push_back({{"features", result.all_clusters.Name(e.features)},
                              {"median", e.median},
                              {"tested_against", e.baseline.empty() ? "intercept"
                                                                    : result.all_clusters.Name(e.baseline)},
                              {"p_value", e.p_value},
                              {"adds_power", e.significant}});
    }
    std::vector<std::string> significant;
    for (std::size_t c : result.all_clusters.SignificantFeatures()) {
      significant.push_back(result.all_clusters.Name(sfit::FeatureSet{c}));
    }
    std::vector<std::size_t> dropped;
    for (std::size_t c = 0; c < clustered.sizes.size(); ++c) {
      if (clustered.sizes[c] < cfg.clustering.min_cluster_size) dropped.push_back(c + 1);
    }
    result.summary = {
        {"config", ConfigToJson(cfg)},
        {"data", cfg.input.generate
                     ? std::string(fcps::Info(cfg.input.generate->shape).name) + "-like (generated)"
                     : cfg.input.csv->string()},
        {"rows", raw.rows()},
        {"features", raw.feature_names},
        {"clustering",
         {{"algorithm", clustered.algorithm},
          {"sizes", clustered.sizes},
          {"dropped_clusters", dropped},
          {"final_sizes", assignment.sizes},
          {"ari_vs_input_labels",
           result.ari_vs_input_labels ? nlohmann::json(*result.ari_vs_input_labels) : nlohmann::json()}}},
        {"split_sizes", {parts[0].size(), parts[1].size(), parts[2].size()}},
        {"training",
         {{"epochs_run", model.log.validation_loss.size()},
          {"best_epoch", model.log.best_epoch + 1},
          {"best_validation_loss", model.log.validation_loss.at(model.log.best_epoch)},
          {"model_fingerprint", model.Fingerprint()}}},
        {"test_accuracy", result.test_accuracy},
        {"sfit_all", {{"significant_features", significant}, {"interactions", interactions}}},
        {"clusters", clusters},
        {"mean_overlap", overlap_count == 0 ? nlohmann::json() : nlohmann::json(overlap_sum / static_cast<double>(overlap_count))}};
    WriteJson(dir / "summary.json", result.summary);
    return 0;
  });
  return result;
}

}  // namespace xclust::pipeline
