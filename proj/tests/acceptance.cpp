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

// Acceptance checks. With no argument every criterion runs; with a number
// only that one runs. One PASS/FAIL line is printed per criterion and the
// exit status is non-zero if any of them failed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "xclust/centroid.hpp"
#include "xclust/clustering.hpp"
#include "xclust/dataset.hpp"
#include "xclust/mlp.hpp"
#include "xclust/pipeline.hpp"
#include "xclust/rng.hpp"
#include "xclust/sfit.hpp"
#include "xclust/stats.hpp"
#include "xclust/synthetic.hpp"

using namespace xclust;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), fmt, v);
  return buffer;
}

// Standardized, intercept-prefixed data split 70/15/15 and a default
// network trained on the first two parts.
struct Fitted {
  MlpModel model;
  Dataset inference;
};

Fitted FitDefault(const Dataset& raw, std::uint64_t seed) {
  const Dataset d = AddIntercept(Standardize(raw).first);
  const auto parts = Split(d, {{0.7, 0.15, 0.15}, Rng::Derive(seed, 1)});
  MlpConfig cfg;
  cfg.seed = Rng::Derive(seed, 2);
  return {Train(parts[0], parts[1], cfg), parts[2]};
}

Outcome BinomialOracle() {
  const auto start = Clock::now();
  // Pascal's triangle, each row already divided by 2^n.
  std::vector<long double> row{1.0L};
  double worst = 0.0;
  for (std::size_t n = 1; n <= 200; ++n) {
    std::vector<long double> next(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      next[i] = 0.5L * ((i > 0 ? row[i - 1] : 0.0L) + (i < n ? row[i] : 0.0L));
    }
    row.swap(next);
    long double tail = 0.0L;
    for (std::size_t k = n + 1; k-- > 0;) {
      tail += row[k];
      worst = std::max(worst, std::abs(stats::BinomTestGreater(k, n) - static_cast<double>(tail)));
    }
  }
  const double secs = Seconds(start);
  return {worst < 1e-12 && secs < 5.0,
          "max |p - oracle| = " + Format("%.3g", worst) + ", " + Format("%.2f", secs) + " s"};
}

Outcome MedianCiIndices() {
  // 0.975 normal quantile, fixed independently of the library.
  const double q = 1.959963984540054;
  bool exact = true;
  std::string detail;
  for (std::size_t n : {25, 77, 100, 500}) {
    const double half = (static_cast<double>(n) + 1.0) / 2.0;
    const double spread = q * std::sqrt(static_cast<double>(n)) / 2.0;
    const auto lo = static_cast<std::size_t>(std::floor(half - spread));
    const auto hi = static_cast<std::size_t>(std::ceil(half + spread));
    const auto got = stats::MedianCiIndices(n, 0.05);
    exact = exact && got.first == lo && got.second == hi;
    detail += "n=" + std::to_string(n) + ":" + std::to_string(got.first) + "/" +
              std::to_string(got.second) + " ";
  }
  Rng rng(20);
  int covered = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> v(100);
    for (auto& x : v) x = rng.Normal();
    const auto ci = stats::MedianConfidenceInterval(v, 0.05);
    if (ci.lower <= 0.0 && 0.0 <= ci.upper) ++covered;
  }
  const double coverage = covered / static_cast<double>(trials);
  return {exact && coverage >= 0.93 && coverage <= 0.97,
          detail + "coverage " + Format("%.3f", coverage)};
}

Outcome MaskedEquivalence() {
  bool pass = true;
  std::string detail;
  const Fitted fit = FitDefault(fcps::Generate({fcps::Shape::kEngyTime, 800, 1, 0.0}), 1);
  sfit::SfitParams params;
  params.beta = 0.05;
  for (std::size_t j = 1; j < fit.inference.width(); ++j) {
    MlpModel masked = fit.model;
    masked.layers[0].weight.col(static_cast<Eigen::Index>(j)).setZero();
    const auto a = sfit::FirstOrder(masked, fit.inference, params);
    const auto b = sfit::FirstOrder(masked, fit.inference, params);
    const auto& e = *a.Find(sfit::FeatureSet{j});
    const auto& again = *b.Find(sfit::FeatureSet{j});
    const bool ok = e.p_value == 1.0 && !e.significant && again.p_value == e.p_value &&
                    again.n_positive == e.n_positive;
    pass = pass && ok;
    detail += "X" + std::to_string(j) + ": p=" + Format("%g", e.p_value) + " ";
  }
  return {pass, detail};
}

std::vector<std::size_t> FirstOrderSignificant(fcps::Shape shape, std::size_t n, std::uint64_t seed) {
  const Fitted fit = FitDefault(fcps::Generate({shape, n, seed, 0.0}), seed);
  return sfit::FirstOrder(fit.model, fit.inference, {}).SignificantFeatures();
}

Outcome TwoDimensionalPatterns() {
  const auto start = Clock::now();
  struct Case {
    fcps::Shape shape;
    std::vector<std::size_t> expected;
    int needed;
  };
  const std::vector<Case> cases = {
      {fcps::Shape::kTwoDiamonds, {1}, 8}, {fcps::Shape::kWingNut, {1}, 8},
      {fcps::Shape::kEngyTime, {1, 2}, 8}, {fcps::Shape::kLsun, {1, 2}, 8},
      {fcps::Shape::kTarget, {1, 2}, 6}};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      if (FirstOrderSignificant(c.shape, 800, seed) == c.expected) ++hits;
    }
    pass = pass && hits >= c.needed;
    detail += std::string(fcps::Info(c.shape).name) + " " + std::to_string(hits) + "/10 ";
  }
  const double secs = Seconds(start);
  return {pass && secs < 300.0, detail + Format("%.1f", secs) + " s"};
}

Outcome ThreeDimensionalInteraction() {
  const auto start = Clock::now();
  bool pass = true;
  std::string detail;
  for (auto shape : {fcps::Shape::kAtom, fcps::Shape::kChainlink, fcps::Shape::kHepta,
                     fcps::Shape::kTetra}) {
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Fitted fit = FitDefault(fcps::Generate({shape, 0, seed, 0.0}), seed);
      sfit::SfitParams params;
      params.max_order = 3;
      const auto report = sfit::HigherOrder(fit.model, fit.inference, params);
      const bool all_three = report.SignificantFeatures() == std::vector<std::size_t>{1, 2, 3};
      const auto* triple = report.Find(sfit::FeatureSet{1, 2, 3});
      bool is_max = triple != nullptr;
      if (is_max) {
        for (const auto& e : report.entries) is_max = is_max && e.median <= triple->median;
      }
      if (all_three && is_max) ++hits;
    }
    pass = pass && hits >= 8;
    detail += std::string(fcps::Info(shape).name) + " " + std::to_string(hits) + "/10 ";
  }
  const double secs = Seconds(start);
  return {pass && secs < 600.0, detail + Format("%.1f", secs) + " s"};
}

Outcome GradientCheck() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    std::vector<std::size_t> widths{7, 5, 3};
    MlpModel m(widths);
    for (auto& l : m.layers) {
      for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = rng.Normal(0, 0.8);
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias(i) = rng.Normal(0, 0.3);
    }
    Eigen::MatrixXd x(8, 7);
    std::vector<int> y;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      x(i, 0) = 1.0;
      for (Eigen::Index j = 1; j < x.cols(); ++j) x(i, j) = rng.Normal();
      y.push_back(static_cast<int>(rng.UniformInt(3)) + 1);
    }
    const MlpGradients g = m.Gradients(x, y);
    std::vector<double> analytic, numeric;
    const double h = 1e-6;
    auto probe = [&](double& param, double grad) {
      const double saved = param;
      param = saved + h;
      const double up = m.MeanLoss(x, y);
      param = saved - h;
      const double down = m.MeanLoss(x, y);
      param = saved;
      analytic.push_back(grad);
      numeric.push_back((up - down) / (2 * h));
    };
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      for (Eigen::Index i = 0; i < m.layers[l].weight.size(); ++i) {
        probe(m.layers[l].weight.data()[i], g.layers[l].weight.data()[i]);
      }
      for (Eigen::Index i = 0; i < m.layers[l].bias.size(); ++i) probe(m.layers[l].bias(i), g.layers[l].bias(i));
    }
    double diff = 0, norm_a = 0, norm_n = 0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
      norm_a += analytic[i] * analytic[i];
      norm_n += numeric[i] * numeric[i];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(1e-12, std::sqrt(norm_a) + std::sqrt(norm_n)));
  }
  return {worst < 1e-3, "max relative error " + Format("%.3g", worst) + " over 20 seeds"};
}

Outcome ClusteringRecovery() {
  const Dataset hepta = fcps::Generate({fcps::Shape::kHepta, 0, 1, 0.0});
  const auto ward = AgglomerativeWard(hepta, 7);
  const double ari_ward = oracle::PairCountingAri(ward.assignment.labels, *hepta.labels);
  const Dataset tetra = fcps::Generate({fcps::Shape::kTetra, 0, 1, 0.0});
  KMeansOptions opts;
  opts.k = 4;
  opts.seed = 1;
  opts.restarts = 10;
  const auto km = KMeans(tetra, opts);
  const double ari_km = oracle::PairCountingAri(km.assignment.labels, *tetra.labels);
  return {ari_ward >= 0.95 && ari_km >= 0.95,
          "Ward/Hepta ARI " + Format("%.4f", ari_ward) + ", k-means/Tetra ARI " + Format("%.4f", ari_km)};
}

Outcome ClassifierSanity() {
  const Fitted fit = FitDefault(fcps::Generate({fcps::Shape::kHepta, 0, 1, 0.0}), 1);
  const double acc = Accuracy(fit.model, fit.inference);
  return {acc >= 0.95, "held-out accuracy " + Format("%.4f", acc) + " on " +
                           std::to_string(fit.inference.rows()) + " rows"};
}

Outcome CentroidIdentity() {
  const Dataset raw = fcps::Generate({fcps::Shape::kLsun, 0, 4, 0.0});
  const auto a = ClusterAssignment::FromLabels(*raw.labels);
  const Dataset z = Standardize(raw).first;
  const auto report = centroid::DifferenceScores(z, a);
  double identity = 0.0;
  for (std::size_t c = 1; c <= a.num_clusters(); ++c) {
    // Cluster mean computed directly from the rows.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(z.width()));
    double count = 0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      if (a.labels[i] != static_cast<int>(c)) continue;
      sum += z.values.row(static_cast<Eigen::Index>(i)).transpose();
      count += 1;
    }
    const Eigen::VectorXd mean = sum / count;
    const auto& scores = report.For(static_cast<int>(c)).scores;
    identity = std::max(identity, (scores - mean.cwiseAbs()).cwiseAbs().maxCoeff());
  }
  Dataset shifted = raw;
  const Eigen::Vector2d scale(3.5, 0.02), offset(-100.0, 7.25);
  for (Eigen::Index j = 0; j < 2; ++j) {
    shifted.values.col(j) = (shifted.values.col(j).array() * scale(j) + offset(j)).matrix();
  }
  const auto base = centroid::DifferenceScores(raw, a);
  const auto moved = centroid::DifferenceScores(shifted, a);
  double affine = 0.0;
  for (std::size_t c = 1; c <= a.num_clusters(); ++c) {
    affine = std::max(affine, (base.For(static_cast<int>(c)).scores -
                               moved.For(static_cast<int>(c)).scores).cwiseAbs().maxCoeff());
  }
  return {identity < 1e-9 && affine < 1e-9,
          "identity gap " + Format("%.3g", identity) + ", affine gap " + Format("%.3g", affine)};
}

// Four blobs over four features; blob c sits at +4 along feature perm[c].
Dataset DisplacedBlobs(std::uint64_t seed, std::vector<std::size_t>& perm) {
  Rng rng(seed);
  perm = {1, 2, 3, 4};
  rng.Shuffle(perm);
  const std::size_t per_blob = 250;
  Dataset d;
  d.values.resize(static_cast<Eigen::Index>(4 * per_blob), 4);
  std::vector<int> labels;
  for (std::size_t i = 0; i < 4 * per_blob; ++i) {
    const int c = static_cast<int>(i % 4);
    for (Eigen::Index j = 0; j < 4; ++j) d.values(static_cast<Eigen::Index>(i), j) = rng.Normal();
    d.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[static_cast<std::size_t>(c)] - 1)) += 4.0;
    labels.push_back(c + 1);
  }
  d.feature_names = {"X1", "X2", "X3", "X4"};
  d.labels = labels;
  return d;
}

// Feature with the largest median single-feature improvement, by direct
// evaluation of the masked losses.
std::size_t OracleTopFeature(const MlpModel& m, const Dataset& inference, int cluster, double beta) {
  std::size_t best = 0;
  double best_median = -1e300;
  for (std::size_t j = 1; j < inference.width(); ++j) {
    std::vector<double> deltas;
    for (std::size_t i = 0; i < inference.rows(); ++i) {
      if ((*inference.labels)[i] != cluster) continue;
      Eigen::VectorXd base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inference.width()));
      base(0) = 1.0;
      Eigen::VectorXd with = base;
      with(static_cast<Eigen::Index>(j)) =
          inference.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      deltas.push_back((1 - beta) * m.Loss(base, cluster) - m.Loss(with, cluster));
    }
    std::sort(deltas.begin(), deltas.end());
    const double median = deltas[(deltas.size() - 1) / 2];
    if (median > best_median) {
      best_median = median;
      best = j;
    }
  }
  return best;
}

Outcome PerClusterDiscrimination() {
  int good_seeds = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::vector<std::size_t> perm;
    const Fitted fit = FitDefault(DisplacedBlobs(seed, perm), seed);
    bool all = true;
    for (int c = 1; c <= 4; ++c) {
      const auto report = sfit::PerCluster(fit.model, fit.inference, c, {});
      const auto top = sfit::RankFeatures(report, 1);
      const std::size_t expected = perm[static_cast<std::size_t>(c - 1)];
      all = all && !top.empty() && top[0].features == sfit::FeatureSet{expected} &&
            OracleTopFeature(fit.model, fit.inference, c, 0.05) == expected;
    }
    if (all) ++good_seeds;
  }
  return {good_seeds == 10, std::to_string(good_seeds) + "/10 seeds rank every cluster's own feature first"};
}

std::map<std::string, std::string> JsonFiles(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    out[entry.path().filename().string()] = s.str();
  }
  return out;
}

Outcome EndToEndDeterminism() {
  const auto dir = std::filesystem::temp_directory_path() / "xclust_acceptance_pipeline";
  const nlohmann::json j = {{"seed", 11},
                            {"input", {{"generate", {{"shape", "Tetra"}, {"n", 1000}}}}},
                            {"clustering", {{"algorithm", "kmeans"}, {"k", 4}}},
                            {"sfit", {{"max_order", 3}}},
                            {"output_dir", dir.string()}};
  const auto cfg = pipeline::ConfigFromJson(j);
  std::filesystem::remove_all(dir);
  pipeline::RunPipeline(cfg);
  const auto first = JsonFiles(dir);
  std::filesystem::remove_all(dir);
  pipeline::RunPipeline(cfg);
  const auto second = JsonFiles(dir);
  std::filesystem::remove_all(dir);
  return {!first.empty() && first == second,
          std::to_string(first.size()) + " JSON files compared byte for byte"};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"Binomial test oracle equivalence", BinomialOracle},
      {"Median CI indices and coverage", MedianCiIndices},
      {"Masked-equivalence non-significance", MaskedEquivalence},
      {"2D first-order significance patterns", TwoDimensionalPatterns},
      {"3D interaction pattern", ThreeDimensionalInteraction},
      {"Gradient check", GradientCheck},
      {"Clustering recovery", ClusteringRecovery},
      {"Classifier sanity", ClassifierSanity},
      {"Centroid identity and affine invariance", CentroidIdentity},
      {"Per-cluster discrimination", PerClusterDiscrimination},
      {"End-to-end determinism", EndToEndDeterminism},
  };
  std::size_t only = 0;
  if (argc > 1) {
    only = static_cast<std::size_t>(std::strtoul(argv[1], nullptr, 10));
    if (only < 1 || only > criteria.size()) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", outcome.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
