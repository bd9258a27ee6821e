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

// Synthetic RGB-D scenes with analytic ground truth.
//
// Scenes are textured rigid primitives seen by co-located depth and RGB
// pinhole cameras. Every pixel's 3D point and its motion to the next frame
// are known exactly, which makes the renderer the reference for every
// geometric check in the pipeline.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "voxflow/calib.hpp"
#include "voxflow/frames.hpp"
#include "voxflow/voxelizer.hpp"

namespace voxflow {

enum class PrimitiveKind {
  Plane,  // rectangle in the local z = 0 plane, facing the camera at yaw 0
  Box,
};

/// Per-frame rigid motion: translation plus rotation about the vertical
/// axis through the object's center.
struct RigidMotion {
  Vec3 velocity_mm;
  double yaw_rate_deg = 0.0;
};

struct SynthObject {
  PrimitiveKind kind = PrimitiveKind::Plane;
  Vec3 center;       // frame-0 position, mm
  Vec3 half_extent;  // plane uses x and y only
  double yaw_deg = 0.0;
  RigidMotion motion;
  std::uint64_t texture_seed = 1;
  double texture_cell_mm = 12.0;
  std::array<double, 3> tint{1.0, 1.0, 1.0};

  Vec3 center_at(int t) const { return center + motion.velocity_mm * double(t); }
  double yaw_at(int t) const { return yaw_deg + motion.yaw_rate_deg * double(t); }
  /// World position at frame t of a point given in object coordinates.
  Point3 to_world(const Vec3& local, int t) const;
  Vec3 to_local(const Point3& world, int t) const;
};

/// Kinect-v2-like depth camera: 512x424, fx = fy = 365, c = (256, 212).
Intrinsics default_depth_camera();

/// RGB camera co-located with `depth` covering the same field of view at a
/// different resolution (focal lengths scale with width).
Intrinsics scaled_camera(const Intrinsics& depth, int width, int height);

struct SynthScene {
  std::vector<SynthObject> objects;
  Intrinsics camera = default_depth_camera();  // depth camera
  std::optional<Intrinsics> rgb_camera;        // defaults to `camera`
  int frames = 2;
  std::optional<double> background_depth_mm;  // static textured wall, or no return (invalid depth)
  std::uint64_t background_seed = 7;
  double depth_scale = 0.001;
  double max_speed = 500.0;            // mm per frame
  double depth_noise_sigma_mm = 0.0;   // Gaussian jitter on rendered depth
  std::uint64_t noise_seed = 0;

  /// Throws EmptyScene when nothing can be seen, InvalidArgument for depths
  /// outside 500-8000 mm, speeds over max_speed, or fewer than one frame.
  void validate() const;
};

struct RenderedVideo {
  std::vector<RgbFrame> rgb;
  std::vector<DepthFrame> depth;
  CameraRig rig;
  /// gt_motion[t][w * width + u]: motion from frame t to t+1 of the surface
  /// point seen at depth pixel (u, w) in frame t; NaN where nothing is seen.
  std::vector<std::vector<Vec3>> gt_motion;
  /// gt_points[t][...]: that surface point itself, in camera space.
  std::vector<std::vector<Point3>> gt_points;
};

RenderedVideo render(const SynthScene& scene);

/// A textured plane larger than the field of view at `depth_mm`, translating
/// by `velocity` every frame.
SynthScene translating_plane_scene(const Vec3& velocity, double depth_mm, int frames,
                                   std::uint64_t seed);

/// A box "subject" in front of a static textured wall.
SynthScene subject_scene(const RigidMotion& motion, int frames, std::uint64_t seed);

/// Canonical motion patterns for labeled data: 0 +x, 1 -x, 2 +y, 3 -y,
/// 4 +z, 5 -z, 6 +yaw, 7 -yaw, then two-axis translation composites and
/// yaw-plus-translation composites up to 26 classes.
inline constexpr int kMaxMotionClasses = 26;
RigidMotion motion_pattern(int label, double speed_mm, double yaw_rate_deg);

struct LabeledSetOptions {
  int frames = 5;  // one snippet of L frames per sample
  GridDims grid{24, 24, 24};
  int camera_width = 128;
  int camera_height = 106;
  int workers = 1;
};

struct LabeledRecord {
  std::filesystem::path path;
  int label = 0;
};

/// Renders samples_per_class videos per class, runs each through the full
/// pipeline (flow, lift, voxelize) as a single snippet, and writes one VXF
/// per sample plus `index.txt` ("<file>,<label>" per line) into out_dir.
/// Deterministic from seed. Throws InvalidArgument for n_classes outside
/// [1, 26].
std::vector<LabeledRecord> make_labeled_set(int n_classes, int samples_per_class, std::uint64_t seed,
                                            const std::filesystem::path& out_dir,
                                            const LabeledSetOptions& options = {});

}  // namespace voxflow
