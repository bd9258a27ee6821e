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

#include "voxflow/augment.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace voxflow {

namespace {

struct Rotation {
  double c;
  double s;
  Vec3 operator()(const Vec3& v) const { return {v.x * c + v.z * s, v.y, -v.x * s + v.z * c}; }
};

Rotation rotation_for(double theta_deg) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  return {std::cos(t), std::sin(t)};
}

double unit_uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Vec3 rotate_about_vertical(const Vec3& v, double theta_deg) { return rotation_for(theta_deg)(v); }

MotionCloud rotate_cloud(const MotionCloud& cloud, double theta_deg, const Point3& pivot) {
  if (theta_deg == 0.0) return cloud;
  const Rotation rot = rotation_for(theta_deg);
  MotionCloud out;
  out.frame_index = cloud.frame_index;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    out.points.push_back({rot(p.position - pivot) + pivot, rot(p.motion)});
  }
  return out;
}

MotionCloud translate_cloud(const MotionCloud& cloud, const Vec3& offset_mm) {
  MotionCloud out = cloud;
  for (auto& p : out.points) p.position = p.position + offset_mm;
  return out;
}

AugmentParams sample_params(double max_translation_frac, double max_rotation_deg,
                            std::uint64_t seed) {
  if (!(max_translation_frac >= 0.0) || !(max_rotation_deg >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "augmentation bounds must be nonnegative");
  }
  std::mt19937_64 rng(seed);
  // + 0.0 folds a -0.0 draw (zero bound) onto +0.0.
  auto draw = [&](double bound) { return bound * (2.0 * unit_uniform(rng) - 1.0) + 0.0; };
  AugmentParams p;
  p.seed = seed;
  p.translation_frac.x = draw(max_translation_frac);
  p.translation_frac.y = draw(max_translation_frac);
  p.translation_frac.z = draw(max_translation_frac);
  p.rotation_deg = draw(max_rotation_deg);
  return p;
}

MotionCloud apply_augmentation(const MotionCloud& cloud, const AugmentParams& params,
                               const GridSpec& grid) {
  if (params.is_identity()) return cloud;
  const Vec3 extent = grid.extent();
  const Vec3 offset{params.translation_frac.x * extent.x, params.translation_frac.y * extent.y,
                    params.translation_frac.z * extent.z};
  return translate_cloud(rotate_cloud(cloud, params.rotation_deg, grid.center()), offset);
}

}  // namespace voxflow
