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

#include <limits>
#include <vector>

#include "voxflow/calib.hpp"
#include "voxflow/flow2d.hpp"
#include "voxflow/frames.hpp"

namespace voxflow {

struct MotionPoint {
  Point3 position;  // at time t
  Vec3 motion;      // position(t+1) - position(t)
  bool operator==(const MotionPoint&) const = default;
};

struct MotionCloud {
  std::vector<MotionPoint> points;
  int frame_index = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Lifts RGB optical flow into camera-space motion through the registration
/// LUT and the two depth frames. Pixels failing registration, falling off the
/// RGB frame, or landing on invalid depth are skipped. Throws
/// DimensionMismatch when the flow or depth frames disagree with the rig.
MotionCloud lift(const FlowField& flow, const DepthFrame& depth_t, const DepthFrame& depth_t1,
                 const CameraRig& rig, int frame_index = 0);

/// Keeps points with min_mag <= |motion| <= max_mag, preserving order.
MotionCloud filter_cloud(const MotionCloud& cloud, double min_mag,
                         double max_mag = std::numeric_limits<double>::infinity());

}  // namespace voxflow
