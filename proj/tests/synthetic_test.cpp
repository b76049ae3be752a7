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

#include <cmath>
#include <algorithm>

#include "doctest.h"
#include "xclust/synthetic.hpp"

using namespace xclust;

namespace {

Eigen::VectorXd ClassMean(const Dataset& d, int cls) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.width()));
  int count = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if ((*d.labels)[i] != cls) continue;
    sum += d.values.row(static_cast<Eigen::Index>(i)).transpose();
    ++count;
  }
  return sum / count;
}

}  // namespace

TEST_SUITE("synthetic") {

TEST_CASE("catalog") {
  const auto& cat = fcps::ShapeCatalog();
  CHECK(cat.size() == 9);
  CHECK(fcps::Info(fcps::Shape::kTwoDiamonds).dimensions == 2);
  CHECK(fcps::Info(fcps::Shape::kTwoDiamonds).clusters == 2);
  CHECK(fcps::Info(fcps::Shape::kAtom).dimensions == 3);
  CHECK(fcps::Info(fcps::Shape::kAtom).clusters == 2);
  CHECK(fcps::Info(fcps::Shape::kHepta).clusters == 7);
  CHECK(fcps::Info(fcps::Shape::kTetra).clusters == 4);
  CHECK(fcps::ParseShape("wingnut") == fcps::Shape::kWingNut);
  CHECK_FALSE(fcps::ParseShape("Donut").has_value());
}

TEST_CASE("every shape generates valid labeled data") {
  for (const auto& info : fcps::ShapeCatalog()) {
    CAPTURE(info.name);
    const Dataset d = fcps::Generate({info.shape, 0, 1, 0.0});
    CHECK(d.rows() == info.default_n);
    CHECK(d.num_features() == static_cast<std::size_t>(info.dimensions));
    CHECK(d.NumClasses() == info.clusters);
    CHECK(d.feature_names[0] == "X1");
    d.Validate();
  }
}

TEST_CASE("generation is deterministic") {
  const fcps::GenSpec spec{fcps::Shape::kChainlink, 300, 9, 0.01};
  CHECK(fcps::Generate(spec).values == fcps::Generate(spec).values);
  const fcps::GenSpec other{fcps::Shape::kChainlink, 300, 10, 0.01};
  CHECK(fcps::Generate(spec).values != fcps::Generate(other).values);
}

TEST_CASE("two diamonds separate along feature 1 only") {
  const Dataset d = fcps::Generate({fcps::Shape::kTwoDiamonds, 800, 1, 0.0});
  const auto labels = *d.labels;
  CHECK(std::count(labels.begin(), labels.end(), 1) == 400);
  const Eigen::VectorXd m1 = ClassMean(d, 1), m2 = ClassMean(d, 2);
  CHECK(std::abs(m1(0) - m2(0)) > 2.5);
  // Feature 2 has unit-scale spread; 3 sigma / sqrt(400) bound on the gap.
  CHECK(std::abs(m1(1) - m2(1)) < 3.0 / std::sqrt(400.0));
}

TEST_CASE("tetra vertices are equidistant") {
  const Dataset d = fcps::Generate({fcps::Shape::kTetra, 400, 1, 0.0});
  std::vector<Eigen::VectorXd> means;
  for (int c = 1; c <= 4; ++c) means.push_back(ClassMean(d, c));
  double lo = 1e9, hi = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      const double dist = (means[a] - means[b]).norm();
      lo = std::min(lo, dist);
      hi = std::max(hi, dist);
    }
  }
  CHECK(hi / lo < 1.05);
}

TEST_CASE("hepta blobs are well separated") {
  const Dataset d = fcps::Generate({fcps::Shape::kHepta, 212, 1, 0.0});
  CHECK(d.rows() == 212);
  std::vector<Eigen::VectorXd> means;
  for (int c = 1; c <= 7; ++c) means.push_back(ClassMean(d, c));
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) CHECK((means[a] - means[b]).norm() > 2.5);
  }
}

TEST_CASE("atom core sits inside the shell") {
  const Dataset d = fcps::Generate({fcps::Shape::kAtom, 400, 2, 0.0});
  double core_max = 0, shell_min = 1e9;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const double r = d.values.row(static_cast<Eigen::Index>(i)).norm();
    if ((*d.labels)[i] == 1) core_max = std::max(core_max, r);
    else shell_min = std::min(shell_min, r);
  }
  CHECK(core_max < shell_min);
}

}  // TEST_SUITE
