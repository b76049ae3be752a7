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
#include <fstream>
#include <numeric>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "xclust/dataset.hpp"

using xclust::CsvOptions;
using xclust::Dataset;
using xclust::ErrorCode;
using xclust::testing::ThrownCode;
using xclust::testing::ThrownMessage;

namespace {

Dataset Column(std::initializer_list<double> v) {
  Dataset d;
  d.values.resize(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) d.values(i++, 0) = x;
  d.feature_names = {"x"};
  return d;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("parse a small csv") {
  const Dataset d = xclust::ParseCsv("a,b\n1,2\n3,4\n5,6\n", {});
  CHECK(d.rows() == 3);
  CHECK(d.num_features() == 2);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(d.values(2, 1) == 6.0);
  CHECK_FALSE(d.labels.has_value());
  CHECK_FALSE(d.has_intercept);
}

TEST_CASE("csv errors") {
  CHECK(ThrownCode([] { xclust::ParseCsv("", {}); }) == ErrorCode::kParseError);
  const auto msg = ThrownMessage([] { xclust::ParseCsv("a,b\n1,2\n3,x\n", {}); });
  CHECK(msg.find("ParseError") != std::string::npos);
  CHECK(msg.find("'x'") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("b") != std::string::npos);
  CsvOptions opts;
  opts.label_column = "cluster";
  CHECK(ThrownCode([&] { xclust::ParseCsv("a,b\n1,2\n", opts); }) == ErrorCode::kMissingColumn);
  CHECK(ThrownCode([] { xclust::LoadCsv("/nonexistent/file.csv", {}); }).has_value());
}

TEST_CASE("label column") {
  CsvOptions opts;
  opts.label_column = "label";
  const Dataset d = xclust::ParseCsv("a,label,b\n1,2,3\n4,1,6\n", opts);
  CHECK(d.feature_names == std::vector<std::string>{"a", "b"});
  REQUIRE(d.labels.has_value());
  CHECK(*d.labels == std::vector<int>{2, 1});
  CHECK(d.values(1, 1) == 6.0);
  CHECK(ThrownCode([&] { xclust::ParseCsv("a,label\n1,0\n", opts); }).has_value());
  CHECK(ThrownCode([&] { xclust::ParseCsv("a,label\n1,1.5\n", opts); }).has_value());
}

TEST_CASE("headerless csv") {
  CsvOptions opts;
  opts.has_header = false;
  const Dataset d = xclust::ParseCsv("1,2\n3,4\n", opts);
  CHECK(d.rows() == 2);
  CHECK(d.num_features() == 2);
}

TEST_CASE("csv round trip") {
  const auto dir = xclust::testing::ScratchDir("csv");
  Dataset d = xclust::ParseCsv("a,b\n0.1,2\n-3.25,1e-7\n", {});
  d.labels = std::vector<int>{1, 2};
  xclust::WriteCsv(d, dir / "d.csv");
  CsvOptions opts;
  opts.label_column = "label";
  const Dataset back = xclust::LoadCsv(dir / "d.csv", opts);
  CHECK(back.values == d.values);
  CHECK(*back.labels == *d.labels);
}

TEST_CASE("standardize") {
  auto [s, params] = xclust::Standardize(Column({1, 2, 3}));
  CHECK(s.values(0, 0) == doctest::Approx(-std::sqrt(1.5)).epsilon(1e-12));
  CHECK(s.values(1, 0) == doctest::Approx(0.0));
  CHECK(s.values(2, 0) == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  CHECK(params.scales[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(s.standardized);

  auto [again, p2] = xclust::Standardize(s);
  CHECK((again.values - s.values).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(ThrownCode([] { xclust::Standardize(Column({5, 5, 5})); }) ==
        ErrorCode::kDegenerateFeature);

  const Dataset back = xclust::InvertScaling(s, params);
  CHECK((back.values - Column({1, 2, 3}).values).cwiseAbs().maxCoeff() < 1e-12);
  const Dataset applied = xclust::ApplyScaling(Column({1, 2, 3}), params);
  CHECK((applied.values - s.values).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("scaling params json") {
  xclust::ScalingParams p{{1.0, 2.0}, {0.5, 3.0}};
  const nlohmann::json j = p;
  const auto back = j.get<xclust::ScalingParams>();
  CHECK(back.means == p.means);
  CHECK(back.scales == p.scales);
}

TEST_CASE("one hot encoding") {
  Dataset d = Column({0, 1, 1});
  const std::vector<std::string> cols{"x"};
  const Dataset e = xclust::OneHotEncode(d, cols);
  REQUIRE(e.num_features() == 2);
  CHECK(e.values.col(0) == Eigen::Vector3d(1, 0, 0));
  CHECK(e.values.col(1) == Eigen::Vector3d(0, 1, 1));

  const Dataset single = xclust::OneHotEncode(Column({4, 4}), cols);
  REQUIRE(single.num_features() == 1);
  CHECK(single.values.col(0).sum() == 2.0);

  const std::vector<std::string> missing{"nope"};
  CHECK(ThrownCode([&] { xclust::OneHotEncode(d, missing); }) == ErrorCode::kMissingColumn);
}

TEST_CASE("intercept") {
  const Dataset d = xclust::AddIntercept(Column({2, 3}));
  CHECK(d.has_intercept);
  CHECK(d.width() == 2);
  CHECK(d.values(0, 0) == 1.0);
  CHECK(d.values(1, 1) == 3.0);
  CHECK(d.first_feature_column() == 1);
  CHECK(ThrownCode([&] { xclust::AddIntercept(d); }) == ErrorCode::kInterceptAlreadyPresent);

  Dataset empty;
  empty.values.resize(4, 0);
  const Dataset ones = xclust::AddIntercept(empty);
  CHECK(ones.width() == 1);
  CHECK(ones.values.sum() == 4.0);
}

TEST_CASE("split sizes and determinism") {
  const xclust::SplitSpec spec{{0.7, 0.3}, 7};
  const auto a = xclust::SplitIndices(10, spec);
  const auto b = xclust::SplitIndices(10, spec);
  CHECK(a == b);
  REQUIRE(a.size() == 2);
  CHECK(a[0].size() == 7);
  CHECK(a[1].size() == 3);
  std::set<std::size_t> all(a[0].begin(), a[0].end());
  all.insert(a[1].begin(), a[1].end());
  CHECK(all.size() == 10);

  CHECK(ThrownCode([] { xclust::SplitIndices(10, {{0.7, 0.2}, 1}); }) ==
        ErrorCode::kInvalidFractions);
  CHECK(ThrownCode([] { xclust::SplitIndices(10, {{1.2, -0.2}, 1}); }) ==
        ErrorCode::kInvalidFractions);
}

TEST_CASE("split reproduces 480/125/77") {
  const xclust::SplitSpec spec{{480.0 / 682, 125.0 / 682, 77.0 / 682}, 3};
  const auto parts = xclust::SplitIndices(682, spec);
  CHECK(parts[0].size() == 480);
  CHECK(parts[1].size() == 125);
  CHECK(parts[2].size() == 77);
}

TEST_CASE("split datasets carry labels") {
  Dataset d = Column({0, 1, 2, 3, 4, 5});
  d.labels = std::vector<int>{1, 2, 1, 2, 1, 2};
  const auto parts = xclust::Split(d, {{0.5, 0.5}, 11});
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const int v = static_cast<int>(p.values(static_cast<Eigen::Index>(i), 0));
      CHECK((*p.labels)[i] == (v % 2 == 0 ? 1 : 2));
    }
  }
}

TEST_CASE("validate") {
  Dataset d = Column({1, 2});
  d.values(1, 0) = std::nan("");
  CHECK(ThrownCode([&] { d.Validate(); }).has_value());
  Dataset e = Column({1, 2});
  e.labels = std::vector<int>{1};
  CHECK(ThrownCode([&] { e.Validate(); }).has_value());
}

}  // TEST_SUITE
