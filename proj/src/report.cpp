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

#include "xclust/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "xclust/error.hpp"

namespace xclust::report {
namespace {

using Row = std::vector<std::string>;

std::string Fixed(double v, int digits = 4) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

std::string Pvalue(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), v < 1e-4 ? "%.2e" : "%.4f", v);
  return buffer;
}

// First column left-aligned, the rest right-aligned.
std::string Table(const Row& header, const std::vector<Row>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const Row& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << " | ";
      const std::string pad(width[c] - row[c].size(), ' ');
      out << (c == 0 ? row[c] + pad : pad + row[c]);
    }
    out << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t w : width) total += w;
  out << std::string(total + 3 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) emit(row);
  return out.str();
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

}  // namespace

std::string RenderSfitTable(const sfit::SfitReport& report) {
  std::ostringstream out;
  out << (report.cluster ? "Cluster " + std::to_string(*report.cluster) : std::string("All clusters"))
      << " (alpha=" << report.params.alpha << ", beta=" << report.params.beta << ")\n";

  std::vector<const sfit::SfitEntry*> singles;
  for (const auto* e : report.EntriesOfOrder(1)) {
    if (e->significant) singles.push_back(e);
  }
  std::stable_sort(singles.begin(), singles.end(), [](const auto* a, const auto* b) {
    if (a->median != b->median) return a->median > b->median;
    return a->features < b->features;
  });
  if (singles.empty()) {
    out << "no significant features\n";
  } else {
    std::vector<Row> rows;
    for (const auto* e : singles) {
      rows.push_back({report.Name(e->features), Fixed(e->median), Fixed(e->ci_lower),
                      Fixed(e->ci_upper)});
    }
    out << Table({"Variable", "Median", "CI lower", "CI upper"}, rows);
  }

  std::vector<Row> interactions;
  for (const auto& e : report.entries) {
    if (e.order() < 2) continue;
    interactions.push_back({report.Name(e.features), Fixed(e.median), Fixed(e.ci_lower),
                            Fixed(e.ci_upper),
                            e.baseline.empty() ? "intercept" : report.Name(e.baseline),
                            Pvalue(e.p_value), e.significant ? "yes" : "NS"});
  }
  if (!interactions.empty()) {
    out << '\n'
        << Table({"Interaction", "Median", "CI lower", "CI upper", "Tested against", "p-value",
                  "Adds power"},
                 interactions);
  }
  return out.str();
}

std::string RenderCentroidTables(const nlohmann::json& centroid_json) {
  std::ostringstream out;
  const auto top_k = centroid_json.at("top_k").get<std::size_t>();
  for (const auto& cluster : centroid_json.at("clusters")) {
    out << "Cluster " << cluster.at("cluster").get<int>() << " top " << top_k
        << " features by score of difference\n";
    std::vector<std::pair<std::string, double>> scores;
    for (const auto& s : cluster.at("scores")) {
      scores.emplace_back(s.at("feature").get<std::string>(), s.at("D").get<double>());
    }
    std::vector<Row> rows;
    for (const auto& name : cluster.at("top_k")) {
      const auto it = std::find_if(scores.begin(), scores.end(),
                                   [&](const auto& s) { return s.first == name.get<std::string>(); });
      rows.push_back({name.get<std::string>(), it == scores.end() ? "?" : Fixed(it->second, 6)});
    }
    out << Table({"Variable", "Score of difference"}, rows) << '\n';
  }
  return out.str();
}

std::string RenderDirectory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kMissingFile, "no such directory: " + dir.string());
  }
  std::vector<std::filesystem::path> sfit_files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("sfit_", 0) == 0 && entry.path().extension() == ".json") {
      sfit_files.push_back(entry.path());
    }
  }
  // sfit_all first, then clusters in numeric order.
  auto key = [](const std::filesystem::path& p) {
    const std::string stem = p.stem().string();
    const auto pos = stem.rfind('_');
    const std::string tail = stem.substr(pos + 1);
    const bool numeric = !tail.empty() && std::all_of(tail.begin(), tail.end(), ::isdigit);
    return std::make_pair(numeric ? 1 : 0, numeric ? std::stol(tail) : 0L);
  };
  std::sort(sfit_files.begin(), sfit_files.end(),
            [&](const auto& a, const auto& b) { return key(a) < key(b); });

  const auto centroid_path = dir / "centroid.json";
  const bool has_centroid = std::filesystem::exists(centroid_path);
  if (sfit_files.empty() && !has_centroid) {
    throw Error(ErrorCode::kMissingFile, "no sfit_*.json or centroid.json in " + dir.string());
  }
  std::ostringstream out;
  for (const auto& path : sfit_files) {
    out << RenderSfitTable(sfit::ReportFromJson(ReadJson(path))) << '\n';
  }
  if (has_centroid) out << RenderCentroidTables(ReadJson(centroid_path));
  return out.str();
}

}  // namespace xclust::report
