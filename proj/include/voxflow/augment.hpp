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

// Out-of-plane augmentation of motion clouds: rigid translation of the
// points and rotation of points and motion vectors about the vertical
// (camera y) axis.

#pragma once

#include <cstdint>

#include "voxflow/lift3d.hpp"
#include "voxflow/voxelizer.hpp"

namespace voxflow {

struct AugmentParams {
  Vec3 translation_frac;     // per-axis fraction of the grid extent
  double rotation_deg = 0.0; // about +y, right-handed
  std::uint64_t seed = 0;

  bool is_identity() const { return translation_frac == Vec3{} && rotation_deg == 0.0; }
};

/// Right-handed rotation about +y: (x, z) -> (x cos + z sin, -x sin + z cos).
Vec3 rotate_about_vertical(const Vec3& v, double theta_deg);

/// Rotates positions about the vertical axis through pivot, and motion
/// vectors by the same rotation (no pivot). theta = 0 returns the input
/// unchanged, bit for bit.
MotionCloud rotate_cloud(const MotionCloud& cloud, double theta_deg, const Point3& pivot);

/// Shifts positions; motion vectors are untouched.
MotionCloud translate_cloud(const MotionCloud& cloud, const Vec3& offset_mm);

/// Uniform draws in [-max, max] for tx, ty, tz and rotation, in that order,
/// from a 64-bit Mersenne Twister seeded with `seed`. Throws InvalidArgument
/// for negative bounds.
AugmentParams sample_params(double max_translation_frac, double max_rotation_deg,
                            std::uint64_t seed);

/// Rotation about the grid center followed by translation of
/// translation_frac * grid extent.
MotionCloud apply_augmentation(const MotionCloud& cloud, const AugmentParams& params,
                               const GridSpec& grid);

}  // namespace voxflow
