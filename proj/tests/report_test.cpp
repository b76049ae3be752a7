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

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "xclust/report.hpp"

using namespace xclust;

namespace {

sfit::SfitReport FiveFeatureReport(bool significant) {
  sfit::SfitReport r;
  r.feature_names = {"gpm", "at_turn", "lt_debt", "curr_debt", "npm"};
  r.cluster = 1;
  const double medians[] = {0.755, 0.677, 0.556, 0.501, 0.602};
  for (std::size_t c = 1; c <= 5; ++c) {
    sfit::SfitEntry e;
    e.features = sfit::FeatureSet{c};
    e.median = medians[c - 1];
    e.ci_lower = e.median - 0.1;
    e.ci_upper = e.median + 0.1;
    e.significant = significant;
    r.entries.push_back(e);
  }
  return r;
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("sfit table sorted by median") {
  const auto lines = Lines(report::RenderSfitTable(FiveFeatureReport(true)));
  REQUIRE(lines.size() == 8);
  CHECK(lines[0].rfind("Cluster 1", 0) == 0);
  CHECK(lines[1].find("Variable") != std::string::npos);
  CHECK(lines[1].find("CI lower") != std::string::npos);
  CHECK(lines[3].rfind("gpm", 0) == 0);
  CHECK(lines[4].rfind("at_turn", 0) == 0);
  CHECK(lines[5].rfind("npm", 0) == 0);
  CHECK(lines[6].rfind("lt_debt", 0) == 0);
  CHECK(lines[7].rfind("curr_debt", 0) == 0);
  CHECK(lines[3].find("0.7550") != std::string::npos);
}

TEST_CASE("empty significant set") {
  const auto text = report::RenderSfitTable(FiveFeatureReport(false));
  CHECK(text.find("no significant features") != std::string::npos);
}

TEST_CASE("centroid tables") {
  const nlohmann::json j = {
      {"feature_names", {"opmbd", "at_turn"}},
      {"top_k", 2},
      {"clusters",
       {{{"cluster", 1},
         {"size", 10},
         {"centroid", {0.0, 0.0}},
         {"scores", {{{"feature", "opmbd"}, {"D", 0.830108}}, {{"feature", "at_turn"}, {"D", 0.815331}}}},
         {"top_k", {"opmbd", "at_turn"}}}}}};
  const auto lines = Lines(report::RenderCentroidTables(j));
  REQUIRE(lines.size() >= 5);
  CHECK(lines[1].find("Score of difference") != std::string::npos);
  CHECK(lines[3].find("0.830108") != std::string::npos);
  CHECK(lines[4].rfind("at_turn", 0) == 0);
}

TEST_CASE("directory rendering") {
  const auto dir = xclust::testing::ScratchDir("report");
  CHECK(xclust::testing::ThrownCode([&] { report::RenderDirectory(dir); }) == ErrorCode::kMissingFile);
  std::ofstream(dir / "sfit_cluster_10.json") << nlohmann::json(FiveFeatureReport(true)).dump();
  auto two = FiveFeatureReport(true);
  two.cluster = 2;
  std::ofstream(dir / "sfit_cluster_2.json") << nlohmann::json(two).dump();
  const auto text = report::RenderDirectory(dir);
  CHECK(text.find("Cluster 2") < text.find("Cluster 1 "));
}

}  // TEST_SUITE
