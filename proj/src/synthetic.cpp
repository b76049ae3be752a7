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

#include "xclust/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "xclust/error.hpp"
#include "xclust/rng.hpp"

namespace xclust::fcps {
namespace {

using Point = std::array<double, 3>;
constexpr double kPi = std::numbers::pi;

// Splits n into `parts` sizes differing by at most one.
std::vector<std::size_t> Balanced(std::size_t n, std::size_t parts) {
  std::vector<std::size_t> sizes(parts, n / parts);
  for (std::size_t k = 0; k < n % parts; ++k) ++sizes[k];
  return sizes;
}

Point UnitSphere(Rng& rng) {
  // Normalized Gaussian triple is uniform on the sphere.
  Point v{};
  double norm = 0.0;
  do {
    v = {rng.Normal(), rng.Normal(), rng.Normal()};
    norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  } while (norm < 1e-12);
  return {v[0] / norm, v[1] / norm, v[2] / norm};
}

Point Diamond(Rng& rng, double cx) {
  // Linear image of a square is uniform on the L1 ball |x|+|y| <= 1.
  const double u = rng.Uniform(-1.0, 1.0);
  const double v = rng.Uniform(-1.0, 1.0);
  return {cx + 0.5 * (u + v), 0.5 * (u - v), 0.0};
}

Point WingNut(Rng& rng, int side) {
  // Density grows towards the gap at x = 0.
  const double u = rng.Uniform();
  const double depth = 3.0 * u * u;
  const double x = side < 0 ? -0.1 - depth : 0.1 + depth;
  return {x, rng.Uniform(0.0, 2.0), 0.0};
}

Point EngyTime(Rng& rng, int cls) {
  const double z1 = rng.Normal();
  const double z2 = rng.Normal();
  if (cls == 0) return {z1, 0.8 * z2, 0.0};
  // Correlated, elongated second component.
  return {2.5 + 1.2 * z1, 3.5 + 0.3 * z1 + 0.7 * z2, 0.0};
}

Point Lsun(Rng& rng, int cls) {
  if (cls == 0) {
    // L-shape: vertical bar [0,1]x[0,4] union horizontal bar [1,4]x[0,1],
    // sampled proportionally to area (4 vs 3).
    if (rng.Uniform() < 4.0 / 7.0) return {rng.Uniform(0.0, 1.0), rng.Uniform(0.0, 4.0), 0.0};
    return {rng.Uniform(1.0, 4.0), rng.Uniform(0.0, 1.0), 0.0};
  }
  // Elliptical blobs, uniform inside the ellipse.
  const double r = std::sqrt(rng.Uniform());
  const double t = rng.Uniform(0.0, 2.0 * kPi);
  if (cls == 1) return {2.8 + 0.8 * r * std::cos(t), 3.0 + 0.5 * r * std::sin(t), 0.0};
  return {5.5 + 0.4 * r * std::cos(t), 2.2 + 0.9 * r * std::sin(t), 0.0};
}

Point TargetCore(Rng& rng) { return {0.4 * rng.Normal(), 0.4 * rng.Normal(), 0.0}; }

Point TargetRing(Rng& rng) {
  const double t = rng.Uniform(0.0, 2.0 * kPi);
  const double r = rng.Uniform(2.0, 2.6);
  return {r * std::cos(t), r * std::sin(t), 0.0};
}

Point TargetOutlier(Rng& rng, std::size_t corner) {
  const double sx = (corner & 1U) ? 1.0 : -1.0;
  const double sy = (corner & 2U) ? 1.0 : -1.0;
  return {4.0 * sx + 0.2 * rng.Normal(), 4.0 * sy + 0.2 * rng.Normal(), 0.0};
}

Point Atom(Rng& rng, int cls) {
  const Point dir = UnitSphere(rng);
  // Core: uniform ball of radius 0.5. Shell: radii in [1.5, 2].
  const double r = cls == 0 ? 0.5 * std::cbrt(rng.Uniform()) : rng.Uniform(1.5, 2.0);
  return {r * dir[0], r * dir[1], r * dir[2]};
}

Point Chainlink(Rng& rng, int cls) {
  const double t = rng.Uniform(0.0, 2.0 * kPi);
  const double a = rng.Uniform(0.0, 2.0 * kPi);
  const double s = 0.1 * std::sqrt(rng.Uniform());
  // Ring 0 lies in the xy-plane around the origin; ring 1 lies in the
  // xz-plane around (1,0,0), so each ring threads the other.
  const double radial = 1.0 + s * std::cos(a);
  const double normal = s * std::sin(a);
  if (cls == 0) return {radial * std::cos(t), radial * std::sin(t), normal};
  return {1.0 + radial * std::cos(t), normal, radial * std::sin(t)};
}

Point Hepta(Rng& rng, int cls) {
  Point c{0.0, 0.0, 0.0};
  if (cls > 0) {
    const int axis = (cls - 1) / 2;
    c[static_cast<std::size_t>(axis)] = (cls % 2 == 1) ? 3.0 : -3.0;
  }
  return {c[0] + 0.3 * rng.Normal(), c[1] + 0.3 * rng.Normal(), c[2] + 0.3 * rng.Normal()};
}

Point Tetra(Rng& rng, int cls) {
  static constexpr std::array<Point, 4> kVertices = {
      Point{1.0, 1.0, 1.0}, Point{1.0, -1.0, -1.0}, Point{-1.0, 1.0, -1.0},
      Point{-1.0, -1.0, 1.0}};
  const double scale = 1.0 / std::sqrt(3.0);
  const Point& v = kVertices[static_cast<std::size_t>(cls)];
  return {scale * v[0] + 0.15 * rng.Normal(), scale * v[1] + 0.15 * rng.Normal(),
          scale * v[2] + 0.15 * rng.Normal()};
}

}  // namespace

const std::vector<ShapeInfo>& ShapeCatalog() {
  static const std::vector<ShapeInfo> kCatalog = {
      {Shape::kAtom, "Atom", 3, 2, 800},
      {Shape::kChainlink, "Chainlink", 3, 2, 1000},
      {Shape::kEngyTime, "EngyTime", 2, 2, 800},
      {Shape::kHepta, "Hepta", 3, 7, 212},
      {Shape::kLsun, "Lsun", 2, 3, 800},
      {Shape::kTarget, "Target", 2, 2, 800},
      {Shape::kTetra, "Tetra", 3, 4, 400},
      {Shape::kTwoDiamonds, "TwoDiamonds", 2, 2, 800},
      {Shape::kWingNut, "WingNut", 2, 2, 800},
  };
  return kCatalog;
}

const ShapeInfo& Info(Shape shape) {
  for (const auto& info : ShapeCatalog()) {
    if (info.shape == shape) return info;
  }
  throw Error(ErrorCode::kInvalidSpec, "unknown shape");
}

std::optional<Shape> ParseShape(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string wanted = lower(name);
  for (const auto& info : ShapeCatalog()) {
    if (lower(info.name) == wanted) return info.shape;
  }
  return std::nullopt;
}

Dataset Generate(const GenSpec& spec) {
  const ShapeInfo& info = Info(spec.shape);
  const std::size_t n = spec.n == 0 ? info.default_n : spec.n;
  const auto clusters = static_cast<std::size_t>(info.clusters);
  if (n < 2 * clusters) {
    throw Error(ErrorCode::kInvalidSpec,
                std::string(info.name) + " needs n >= " + std::to_string(2 * clusters));
  }
  if (!(spec.noise >= 0.0) || !std::isfinite(spec.noise)) {
    throw Error(ErrorCode::kInvalidSpec, "noise must be a finite non-negative value");
  }

  Rng rng(spec.seed);
  std::vector<Point> points;
  std::vector<int> labels;
  points.reserve(n);
  labels.reserve(n);
  auto emit = [&](const Point& p, int cls) {
    points.push_back(p);
    labels.push_back(cls + 1);
  };

  if (spec.shape == Shape::kTarget) {
    // Core holds 45% of the points; ring plus the four corner outlier
    // groups (5%) form the second class.
    const auto core = static_cast<std::size_t>(std::llround(0.45 * static_cast<double>(n)));
    const auto outliers =
        std::max<std::size_t>(4, static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(n))));
    const std::size_t ring = n - core - std::min(outliers, n - core - 1);
    for (std::size_t i = 0; i < core; ++i) emit(TargetCore(rng), 0);
    for (std::size_t i = 0; i < ring; ++i) emit(TargetRing(rng), 1);
    for (std::size_t i = 0; core + ring + i < n; ++i) emit(TargetOutlier(rng, i % 4), 1);
  } else {
    const auto sizes = Balanced(n, clusters);
    for (std::size_t c = 0; c < clusters; ++c) {
      const int cls = static_cast<int>(c);
      for (std::size_t i = 0; i < sizes[c]; ++i) {
        switch (spec.shape) {
          case Shape::kAtom: emit(Atom(rng, cls), cls); break;
          case Shape::kChainlink: emit(Chainlink(rng, cls), cls); break;
          case Shape::kEngyTime: emit(EngyTime(rng, cls), cls); break;
          case Shape::kHepta: emit(Hepta(rng, cls), cls); break;
          case Shape::kLsun: emit(Lsun(rng, cls), cls); break;
          case Shape::kTetra: emit(Tetra(rng, cls), cls); break;
          case Shape::kTwoDiamonds: emit(Diamond(rng, cls == 0 ? -1.5 : 1.5), cls); break;
          case Shape::kWingNut: emit(WingNut(rng, cls == 0 ? -1 : 1), cls); break;
          case Shape::kTarget: break;
        }
      }
    }
  }

  // Interleave the classes so files do not come out sorted by label.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.Shuffle(order);

  const auto dims = static_cast<std::size_t>(info.dimensions);
  Dataset data;
  data.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dims));
  std::vector<int> shuffled_labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    const Point& p = points[order[r]];
    for (std::size_t d = 0; d < dims; ++d) {
      double v = p[d];
      if (spec.noise > 0.0) v += spec.noise * rng.Normal();
      data.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) = v;
    }
    shuffled_labels[r] = labels[order[r]];
  }
  for (std::size_t d = 0; d < dims; ++d) data.feature_names.push_back("X" + std::to_string(d + 1));
  data.labels = std::move(shuffled_labels);
  return data;
}

}  // namespace xclust::fcps
