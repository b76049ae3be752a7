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

#ifndef XCLUST_REPORT_HPP_
#define XCLUST_REPORT_HPP_

#include <cstddef>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "xclust/sfit.hpp"

namespace xclust::report {

// "Variable | Median | CI lower | CI upper" over the significant single
// features by decreasing median, followed by the interaction entries if any.
std::string RenderSfitTable(const sfit::SfitReport& report);

// "Variable | Score of difference" for each cluster of a centroid.json
// document, limited to its stored top_k.
std::string RenderCentroidTables(const nlohmann::json& centroid_json);

// Renders every sfit_*.json and centroid.json found in a pipeline output
// directory. Throws MissingFile when the directory holds none of them.
std::string RenderDirectory(const std::filesystem::path& dir);

}  // namespace xclust::report

#endif  // XCLUST_REPORT_HPP_
