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

#include "voxflow/lift3d.hpp"

#include <cmath>
#include <string>

namespace voxflow {

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

MotionCloud lift(const FlowField& flow, const DepthFrame& depth_t, const DepthFrame& depth_t1,
                 const CameraRig& rig, int frame_index) {
  const Intrinsics& intr = rig.depth_intrinsics;
  const RegistrationLut& lut = rig.rgb_to_depth_lut;
  for (const DepthFrame* d : {&depth_t, &depth_t1}) {
    if (d->width != intr.width || d->height != intr.height) {
      throw Error(ErrorCode::DimensionMismatch, "depth frame is " + dims(d->width, d->height) +
                                                    ", rig expects " + dims(intr.width, intr.height));
    }
  }
  if (flow.width != lut.rgb_width() || flow.height != lut.rgb_height()) {
    throw Error(ErrorCode::DimensionMismatch, "flow field is " + dims(flow.width, flow.height) +
                                                  ", RGB frame is " +
                                                  dims(lut.rgb_width(), lut.rgb_height()));
  }

  MotionCloud cloud;
  cloud.frame_index = frame_index;
  for (int j = 0; j < flow.height; ++j) {
    for (int i = 0; i < flow.width; ++i) {
      const auto q0 = lut.lookup_unchecked(i, j);
      if (!q0) continue;
      const std::uint16_t raw0 = depth_t.at(q0->u, q0->w);
      if (!rig.valid_depth(raw0)) continue;

      const Flow2 f = flow.at(i, j);
      const double ei = std::floor(i + double(f.du) + 0.5);
      const double ej = std::floor(j + double(f.dv) + 0.5);
      if (!(ei >= 0 && ej >= 0 && ei < flow.width && ej < flow.height)) continue;
      const auto q1 = lut.lookup_unchecked(int(ei), int(ej));
      if (!q1) continue;
      const std::uint16_t raw1 = depth_t1.at(q1->u, q1->w);
      if (!rig.valid_depth(raw1)) continue;

      const Point3 p0 = backproject(double(q0->u), double(q0->w), rig.depth_mm(raw0), intr);
      const Point3 p1 = backproject(double(q1->u), double(q1->w), rig.depth_mm(raw1), intr);
      cloud.points.push_back({p0, p1 - p0});
    }
  }
  return cloud;
}

MotionCloud filter_cloud(const MotionCloud& cloud, double min_mag, double max_mag) {
  if (!(min_mag >= 0.0 && min_mag < max_mag)) {
    throw Error(ErrorCode::InvalidArgument, "filter bounds must satisfy 0 <= min < max");
  }
  MotionCloud out;
  out.frame_index = cloud.frame_index;
  for (const auto& p : cloud.points) {
    const double m = p.motion.norm();
    if (m >= min_mag && m <= max_mag) out.points.push_back(p);
  }
  return out;
}

}  // namespace voxflow
