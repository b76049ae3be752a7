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

#include "xclust/sfit.hpp"

#include <algorithm>
#include <map>

#include "xclust/error.hpp"
#include "xclust/stats.hpp"

namespace xclust::sfit {
namespace {

std::vector<double> ToVector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::size_t CountPositive(const Eigen::VectorXd& v) {
  // Ties at zero count as non-positive.
  return static_cast<std::size_t>((v.array() > 0.0).count());
}

void CheckInference(const LossModel& model, const Dataset& data) {
  if (!data.has_intercept) {
    throw Error(ErrorCode::kDimensionMismatch, "inference data must carry the intercept column");
  }
  if (data.width() != model.input_width()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "inference width " + std::to_string(data.width()) + ", model expects " +
                    std::to_string(model.input_width()));
  }
  data.RequireLabels();
  if (data.rows() < 2) throw Error(ErrorCode::kTooFewSamples, "need at least 2 inference rows");
}

// Masked losses per feature set, computed once per set.
class LossCache {
 public:
  LossCache(const LossModel& model, const Dataset& data)
      : model_(model), x_(data.values), y_(data.RequireLabels()) {}

  const Eigen::VectorXd& Losses(const FeatureSet& features) {
    auto it = cache_.find(features);
    if (it == cache_.end()) {
      it = cache_.emplace(features, model_.Losses(MaskRows(x_, features), y_)).first;
    }
    return it->second;
  }

  double MedianLoss(const FeatureSet& features) {
    return stats::LowerMedian(ToVector(Losses(features)));
  }

 private:
  const LossModel& model_;
  const Eigen::MatrixXd& x_;
  const std::vector<int>& y_;
  std::map<FeatureSet, Eigen::VectorXd> cache_;
};

SfitEntry MakeEntry(LossCache& cache, const FeatureSet& features, const FeatureSet& baseline,
                    const SfitParams& params) {
  const double keep = 1.0 - params.beta;
  const Eigen::VectorXd& with = cache.Losses(features);
  const Eigen::VectorXd importance = keep * cache.Losses(FeatureSet{}) - with;
  const Eigen::VectorXd increment =
      baseline.empty() ? importance : Eigen::VectorXd(keep * cache.Losses(baseline) - with);

  SfitEntry entry;
  entry.features = features;
  entry.baseline = baseline;
  const std::vector<double> values = ToVector(importance);
  entry.median = stats::LowerMedian(values);
  const auto ci = stats::MedianConfidenceInterval(values, params.alpha);
  entry.ci_lower = ci.lower;
  entry.ci_upper = ci.upper;
  entry.n_total = static_cast<std::size_t>(increment.size());
  entry.n_positive = CountPositive(increment);
  entry.p_value = stats::BinomTestGreater(entry.n_positive, entry.n_total);
  entry.significant = entry.p_value < params.alpha;
  entry.increment_median = stats::LowerMedian(ToVector(increment));
  return entry;
}

void FillReportHeader(SfitReport& report, const LossModel& model, const Dataset& data,
                      const SfitParams& params) {
  report.params = params;
  report.feature_names = data.feature_names;
  if (const auto* mlp = dynamic_cast<const MlpModel*>(&model)) {
    report.model_fingerprint = mlp->Fingerprint();
  }
}

std::vector<SfitEntry> FirstOrderEntries(LossCache& cache, const Dataset& data,
                                         const SfitParams& params) {
  std::vector<SfitEntry> entries;
  for (std::size_t c = 1; c < data.width(); ++c) {
    entries.push_back(MakeEntry(cache, FeatureSet{c}, FeatureSet{}, params));
  }
  return entries;
}

}  // namespace

FeatureSet::FeatureSet(std::initializer_list<std::size_t> columns)
    : FeatureSet(std::vector<std::size_t>(columns)) {}

FeatureSet::FeatureSet(std::vector<std::size_t> columns) : columns_(std::move(columns)) {
  std::sort(columns_.begin(), columns_.end());
  columns_.erase(std::unique(columns_.begin(), columns_.end()), columns_.end());
  if (!columns_.empty() && columns_.front() == 0) {
    throw Error(ErrorCode::kSContainsIntercept, "feature set contains the intercept column");
  }
}

bool FeatureSet::Contains(std::size_t column) const {
  return std::binary_search(columns_.begin(), columns_.end(), column);
}

FeatureSet FeatureSet::With(std::size_t column) const {
  std::vector<std::size_t> out = columns_;
  out.push_back(column);
  return FeatureSet(std::move(out));
}

FeatureSet FeatureSet::Without(std::size_t column) const {
  std::vector<std::size_t> out;
  for (std::size_t c : columns_) {
    if (c != column) out.push_back(c);
  }
  return FeatureSet(std::move(out));
}

void SfitParams::Validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kConfigError, "alpha must be in (0, 1)");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::kConfigError, "beta must be in [0, 1)");
  if (max_order < 1 || max_order > 3) throw Error(ErrorCode::kConfigError, "max_order must be 1, 2 or 3");
}

void to_json(nlohmann::json& j, const SfitParams& params) {
  j = nlohmann::json{{"alpha", params.alpha},
                     {"beta", params.beta},
                     {"max_order", params.max_order},
                     {"all_pairs", params.all_pairs}};
}

void from_json(const nlohmann::json& j, SfitParams& params) {
  const SfitParams defaults;
  params.alpha = j.value("alpha", defaults.alpha);
  params.beta = j.value("beta", defaults.beta);
  params.max_order = j.value("max_order", defaults.max_order);
  params.all_pairs = j.value("all_pairs", defaults.all_pairs);
}

std::vector<const SfitEntry*> SfitReport::EntriesOfOrder(std::size_t order) const {
  std::vector<const SfitEntry*> out;
  for (const auto& e : entries) {
    if (e.order() == order) out.push_back(&e);
  }
  return out;
}

const SfitEntry* SfitReport::Find(const FeatureSet& features) const {
  for (const auto& e : entries) {
    if (e.features == features) return &e;
  }
  return nullptr;
}

std::vector<std::size_t> SfitReport::SignificantFeatures() const {
  std::vector<std::size_t> out;
  for (const auto* e : EntriesOfOrder(1)) {
    if (e->significant) out.push_back(e->features.columns().front());
  }
  return out;
}

std::string SfitReport::Name(const FeatureSet& features) const {
  std::string out;
  for (std::size_t c : features.columns()) {
    if (!out.empty()) out += ", ";
    out += c - 1 < feature_names.size() ? feature_names[c - 1] : "col" + std::to_string(c);
  }
  return features.size() > 1 ? "(" + out + ")" : out;
}

void to_json(nlohmann::json& j, const SfitReport& report) {
  auto names = [&](const FeatureSet& s) {
    std::vector<std::string> out;
    for (std::size_t c : s.columns()) out.push_back(report.feature_names.at(c - 1));
    return out;
  };
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"features", names(e.features)},
                       {"columns", e.features.columns()},
                       {"order", e.order()},
                       {"median", e.median},
                       {"ci", {e.ci_lower, e.ci_upper}},
                       {"p_value", e.p_value},
                       {"n_positive", e.n_positive},
                       {"n_total", e.n_total},
                       {"significant", e.significant},
                       {"baseline", names(e.baseline)},
                       {"increment_median", e.increment_median}});
  }
  j = nlohmann::json{{"params", report.params},
                     {"cluster", report.cluster ? nlohmann::json(*report.cluster) : nlohmann::json()},
                     {"model_fingerprint", report.model_fingerprint},
                     {"feature_names", report.feature_names},
                     {"entries", entries}};
}

SfitReport ReportFromJson(const nlohmann::json& j) {
  SfitReport report;
  report.params = j.at("params").get<SfitParams>();
  if (!j.at("cluster").is_null()) report.cluster = j.at("cluster").get<int>();
  report.model_fingerprint = j.value("model_fingerprint", "");
  j.at("feature_names").get_to(report.feature_names);
  auto columns_of = [&](const nlohmann::json& names) {
    std::vector<std::size_t> out;
    for (const auto& name : names) {
      const auto it = std::find(report.feature_names.begin(), report.feature_names.end(),
                                name.get<std::string>());
      if (it == report.feature_names.end()) {
        throw Error(ErrorCode::kParseError, "unknown feature in report: " + name.get<std::string>());
      }
      out.push_back(static_cast<std::size_t>(it - report.feature_names.begin()) + 1);
    }
    return FeatureSet(std::move(out));
  };
  for (const auto& e : j.at("entries")) {
    SfitEntry entry;
    entry.features = columns_of(e.at("features"));
    entry.median = e.at("median").get<double>();
    entry.ci_lower = e.at("ci").at(0).get<double>();
    entry.ci_upper = e.at("ci").at(1).get<double>();
    entry.p_value = e.at("p_value").get<double>();
    entry.n_positive = e.at("n_positive").get<std::size_t>();
    entry.n_total = e.at("n_total").get<std::size_t>();
    entry.significant = e.at("significant").get<bool>();
    if (e.contains("baseline")) entry.baseline = columns_of(e.at("baseline"));
    entry.increment_median = e.value("increment_median", entry.median);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

Eigen::VectorXd Mask(const Eigen::VectorXd& x, const FeatureSet& features) {
  if (x.size() < 1) throw Error(ErrorCode::kDimensionMismatch, "empty input vector");
  if (!features.empty() && features.columns().back() >= static_cast<std::size_t>(x.size())) {
    throw Error(ErrorCode::kDimensionMismatch, "feature column beyond input width");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  out[0] = x[0];
  for (std::size_t c : features.columns()) out[static_cast<Eigen::Index>(c)] = x[static_cast<Eigen::Index>(c)];
  return out;
}

Eigen::MatrixXd MaskRows(const Eigen::MatrixXd& x, const FeatureSet& features) {
  if (x.cols() < 1) throw Error(ErrorCode::kDimensionMismatch, "input has no columns");
  if (!features.empty() && features.columns().back() >= static_cast<std::size_t>(x.cols())) {
    throw Error(ErrorCode::kDimensionMismatch, "feature column beyond input width");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  out.col(0) = x.col(0);
  for (std::size_t c : features.columns()) {
    out.col(static_cast<Eigen::Index>(c)) = x.col(static_cast<Eigen::Index>(c));
  }
  return out;
}

double Delta(const LossModel& model, const Eigen::VectorXd& x, int y,
             const FeatureSet& features, double beta) {
  if (features.empty()) throw Error(ErrorCode::kInvalidSpec, "delta needs a nonempty feature set");
  return (1.0 - beta) * model.Loss(Mask(x, FeatureSet{}), y) - model.Loss(Mask(x, features), y);
}

SfitReport FirstOrder(const LossModel& model, const Dataset& inference, const SfitParams& params) {
  params.Validate();
  CheckInference(model, inference);
  SfitReport report;
  FillReportHeader(report, model, inference, params);
  LossCache cache(model, inference);
  report.entries = FirstOrderEntries(cache, inference, params);
  return report;
}

SfitReport HigherOrder(const LossModel& model, const Dataset& inference, const SfitParams& params) {
  params.Validate();
  CheckInference(model, inference);
  SfitReport report;
  FillReportHeader(report, model, inference, params);
  LossCache cache(model, inference);
  report.entries = FirstOrderEntries(cache, inference, params);

  std::vector<std::size_t> significant = report.SignificantFeatures();
  const std::size_t p = inference.num_features();
  std::vector<FeatureSet> previous;
  for (std::size_t c = 1; c <= p; ++c) previous.push_back(FeatureSet{c});

  for (int order = 2; order <= params.max_order; ++order) {
    std::vector<FeatureSet> candidates;
    for (const auto& tested : previous) {
      for (std::size_t c : significant) {
        if (!tested.Contains(c)) candidates.push_back(tested.With(c));
      }
    }
    if (order == 2 && params.all_pairs && p <= 10) {
      for (std::size_t a = 1; a <= p; ++a) {
        for (std::size_t b = a + 1; b <= p; ++b) candidates.push_back(FeatureSet{a, b});
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (const auto& set : candidates) {
      // Best strict sub-model: the (k-1)-subset with the lowest median loss,
      // ties to the smallest set.
      FeatureSet best;
      double best_loss = 0.0;
      std::vector<FeatureSet> subsets;
      for (std::size_t c : set.columns()) subsets.push_back(set.Without(c));
      std::sort(subsets.begin(), subsets.end());
      for (const auto& sub : subsets) {
        const double loss = cache.MedianLoss(sub);
        if (best.empty() || loss < best_loss) {
          best = sub;
          best_loss = loss;
        }
      }
      report.entries.push_back(MakeEntry(cache, set, best, params));
    }
    previous = std::move(candidates);
  }
  return report;
}

SfitReport PerCluster(const LossModel& model, const Dataset& inference, int cluster,
                      const SfitParams& params) {
  const auto& labels = inference.RequireLabels();
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == cluster) rows.push_back(i);
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kUnknownCluster,
                "cluster " + std::to_string(cluster) + " has no rows in the inference set");
  }
  if (rows.size() < kMinClusterRows) {
    throw Error(ErrorCode::kTooFewSamples,
                "cluster " + std::to_string(cluster) + " has " + std::to_string(rows.size()) +
                    " inference rows, need " + std::to_string(kMinClusterRows));
  }
  const Dataset subset = inference.Subset(rows);
  SfitReport report = params.max_order > 1 ? HigherOrder(model, subset, params)
                                           : FirstOrder(model, subset, params);
  report.cluster = cluster;
  return report;
}

std::vector<SfitEntry> RankFeatures(const SfitReport& report, std::size_t k) {
  std::vector<SfitEntry> out;
  for (const auto* e : report.EntriesOfOrder(1)) {
    if (e->significant) out.push_back(*e);
  }
  std::stable_sort(out.begin(), out.end(), [](const SfitEntry& a, const SfitEntry& b) {
    if (a.median != b.median) return a.median > b.median;
    return a.features < b.features;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace xclust::sfit
