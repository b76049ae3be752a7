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

#ifndef XCLUST_SYNTHETIC_HPP_
#define XCLUST_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xclust/dataset.hpp"

namespace xclust::fcps {

// Analogs of the nine FCPS benchmark shapes. Geometries are generated
// procedurally and are not the original point files.
enum class Shape {
  kAtom,
  kChainlink,
  kEngyTime,
  kHepta,
  kLsun,
  kTarget,
  kTetra,
  kTwoDiamonds,
  kWingNut,
};

struct ShapeInfo {
  Shape shape;
  std::string_view name;
  int dimensions;
  int clusters;
  std::size_t default_n;
};

// All nine shapes in a stable (alphabetical) order.
const std::vector<ShapeInfo>& ShapeCatalog();
const ShapeInfo& Info(Shape shape);
std::optional<Shape> ParseShape(std::string_view name);

struct GenSpec {
  Shape shape = Shape::kTwoDiamonds;
  std::size_t n = 0;  // 0 selects the shape's default size
  std::uint64_t seed = 0;
  double noise = 0.0;  // std-dev of isotropic Gaussian jitter
};

// Labeled data set with features named X1..Xd. Same spec, same bits.
Dataset Generate(const GenSpec& spec);

}  // namespace xclust::fcps

#endif  // XCLUST_SYNTHETIC_HPP_
