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

#include "xclust/error.hpp"

namespace xclust {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kDegenerateFeature: return "DegenerateFeature";
    case ErrorCode::kInterceptAlreadyPresent: return "InterceptAlreadyPresent";
    case ErrorCode::kInvalidFractions: return "InvalidFractions";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kAllClustersDropped: return "AllClustersDropped";
    case ErrorCode::kLabelMissing: return "LabelMissing";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kSContainsIntercept: return "SContainsIntercept";
    case ErrorCode::kInvalidCounts: return "InvalidCounts";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kUnknownCluster: return "UnknownCluster";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "UnknownError";
}

}  // namespace xclust
