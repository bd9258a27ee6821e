/* Copyright 2026 The voxflow Authors. All Rights Reserved.
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License. */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "voxflow/lift3d.hpp"

namespace voxflow {

using GridDims = std::array<int, 3>;

inline constexpr GridDims kDefaultGridDims{54, 54, 54};

/// Axis-aligned camera-space box split into dims voxels. Voxel intervals are
/// half-open: [min, max) on every axis.
struct GridSpec {
  GridDims dims{};
  Vec3 bounds_min;
  Vec3 bounds_max;

  /// Throws InvalidArgument unless dims >= 1 and max > min on every axis.
  void validate() const;

  /// Millimeters per voxel on each axis.
  Vec3 scale() const;
  Vec3 center() const { return (bounds_min + bounds_max) * 0.5; }
  Vec3 extent() const { return bounds_max - bounds_min; }
  std::size_t voxel_count() const { return std::size_t(dims[0]) * dims[1] * dims[2]; }

  /// Linear index (x * Y + y) * Z + z, or nullopt outside the bounds.
  std::optional<std::size_t> voxel_of(const Point3& p) const;
  Point3 voxel_center(int ix, int iy, int iz) const;

  bool operator==(const GridSpec&) const = default;
};

/// Bounds enclose the [1-percentile, percentile] quantile box of every point
/// across the given clouds, widened by 5% of the extent on each side and
/// rounded outward to float-representable values. Throws EmptyInput when
/// all clouds are empty, InvalidArgument for percentile outside (0.5, 1].
GridSpec fit_grid(std::span<const MotionCloud> clouds, GridDims dims = kDefaultGridDims,
                  double percentile = 0.99);

/// One frame pair on the grid: three motion planes (dx, dy, dz in voxel
/// units, each voxel_count long) and per-voxel point counts.
struct VoxelizedPair {
  GridSpec spec;
  std::vector<float> planes;
  std::vector<std::uint32_t> occupancy;
};

/// Each voxel holds the mean motion of the points inside it, divided by the
/// grid scale. The mean is accumulated in 2^-20 mm fixed point, so the result
/// depends only on the multiset of points, never on their order.
VoxelizedPair voxelize_pair(const MotionCloud& cloud, const GridSpec& spec);

/// Stacked voxelized motion for one snippet. Values are channel-major:
/// index = ((c * X + x) * Y + y) * Z + z, channels ordered dx0, dy0, dz0, dx1, ...
struct SnippetTensor {
  GridSpec spec;
  int channels = 0;
  std::vector<float> values;
  std::vector<std::uint32_t> occupancy;  // per pair per voxel; empty after decoding

  std::size_t voxel_count() const { return spec.voxel_count(); }
  float at(int c, std::size_t voxel) const { return values[std::size_t(c) * voxel_count() + voxel]; }

  /// Grid, channel count and values are identical (occupancy ignored).
  bool same_values(const SnippetTensor& other) const;
};

/// Concatenates L-1 voxelized pairs into 3(L-1) channels. With pad_last the
/// final pair is repeated once more, giving 3L channels. Throws SpecMismatch
/// when the pairs disagree on the grid.
SnippetTensor assemble_snippet(std::span<const VoxelizedPair> pairs, bool pad_last = false);

}  // namespace voxflow
