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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "voxflow/common.hpp"
#include "voxflow/lift3d.hpp"

using namespace voxflow;

namespace {

CameraRig small_rig(int w = 8, int h = 6) {
  CameraRig rig;
  rig.depth_intrinsics = {100.0, 100.0, 4.0, 3.0, w, h};
  rig.rgb_to_depth_lut = RegistrationLut::identity(w, h);
  return rig;
}

DepthFrame flat(int w, int h, std::uint16_t raw) {
  DepthFrame d(w, h);
  std::ranges::fill(d.data, raw);
  return d;
}

}  // namespace

TEST_CASE("zero flow over static depth gives zero motion everywhere") {
  const CameraRig rig = small_rig();
  const DepthFrame d = flat(8, 6, 1000);
  const MotionCloud c = lift(FlowField(8, 6), d, d, rig, 4);
  CHECK(c.frame_index == 4);
  CHECK(c.size() == 48u);
  for (const auto& p : c.points) CHECK(p.motion == Vec3{});
}

TEST_CASE("each point is the difference of two back-projections") {
  const CameraRig rig = small_rig();
  DepthFrame d0 = flat(8, 6, 1000), d1 = flat(8, 6, 1000);
  d1.at(5, 3) = 1200;
  FlowField f(8, 6);
  f.at(3, 3) = {2.4f, -0.3f};  // rounds to (5, 3)

  const MotionCloud c = lift(f, d0, d1, rig);
  const auto it = std::ranges::find_if(c.points, [](const MotionPoint& p) {
    return p.position == backproject(3.0, 3.0, 1000.0, small_rig().depth_intrinsics);
  });
  REQUIRE(it != c.points.end());
  // Hand evaluation: p0 = ((3-4)*1000/100, 0, 1000) = (-10, 0, 1000);
  // p1 = ((5-4)*1200/100, 0, 1200) = (12, 0, 1200).
  CHECK(it->position == Vec3{-10.0, 0.0, 1000.0});
  CHECK(it->motion == Vec3{22.0, 0.0, 200.0});
}

TEST_CASE("pixels are skipped, never fabricated") {
  const CameraRig rig = small_rig();
  const DepthFrame good = flat(8, 6, 1500);

  SUBCASE("invalid depth at t") {
    DepthFrame d0 = good;
    d0.at(2, 2) = 0;
    CHECK(lift(FlowField(8, 6), d0, good, rig).size() == 47u);
  }
  SUBCASE("flow endpoint lands on invalid depth") {
    DepthFrame d1 = good;
    d1.at(6, 2) = 0;
    FlowField f(8, 6);
    f.at(1, 2) = {5.0f, 0.0f};
    // (1,2) -> (6,2) is invalid and (6,2) itself has zero flow onto itself.
    CHECK(lift(f, good, d1, rig).size() == 46u);
  }
  SUBCASE("flow endpoint leaves the frame") {
    FlowField f(8, 6);
    f.at(7, 0) = {0.6f, 0.0f};
    f.at(0, 0) = {0.0f, -0.7f};
    CHECK(lift(f, good, good, rig).size() == 46u);
  }
  SUBCASE("depth beyond the sensor maximum") {
    DepthFrame d0 = good;
    d0.at(0, 0) = 12000;
    CHECK(lift(FlowField(8, 6), d0, good, rig).size() == 47u);
  }
  SUBCASE("unmapped registration entries") {
    CameraRig r = small_rig();
    std::vector<std::uint16_t> pairs(r.rgb_to_depth_lut.pairs().begin(), r.rgb_to_depth_lut.pairs().end());
    pairs[0] = pairs[1] = RegistrationLut::kUnmapped;
    r.rgb_to_depth_lut = RegistrationLut::from_pairs(8, 6, 8, 6, pairs);
    CHECK(lift(FlowField(8, 6), good, good, r).size() == 47u);
  }
}

TEST_CASE("flow is read at RGB resolution and registered through the table") {
  CameraRig rig = small_rig();
  rig.rgb_to_depth_lut = RegistrationLut::affine(16, 12, 8, 6, 0.0, 0.0, 0.5, 0.5);
  const DepthFrame d = flat(8, 6, 1000);
  FlowField f(16, 12);
  f.at(4, 4) = {4.0f, 0.0f};  // RGB (4,4)->(8,4), depth (2,2)->(4,2)
  const MotionCloud c = lift(f, d, d, rig);
  CHECK(c.size() == 15u * 11u);  // last column and row map past the depth image
  const auto moved = std::ranges::count_if(c.points, [](const MotionPoint& p) { return p.motion != Vec3{}; });
  CHECK(moved == 1);
  const auto it = std::ranges::find_if(c.points, [](const MotionPoint& p) { return p.motion != Vec3{}; });
  CHECK(it->motion == Vec3{20.0, 0.0, 0.0});  // (4-2)*1000/100
}

TEST_CASE("dimension checks") {
  const CameraRig rig = small_rig();
  const DepthFrame d = flat(8, 6, 1000);
  auto code_of = [&](const FlowField& f, const DepthFrame& a, const DepthFrame& b) {
    try {
      lift(f, a, b, rig);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  CHECK(code_of(FlowField(7, 6), d, d) == ErrorCode::DimensionMismatch);
  CHECK(code_of(FlowField(8, 6), flat(8, 5, 1), d) == ErrorCode::DimensionMismatch);
  CHECK(code_of(FlowField(8, 6), d, flat(9, 6, 1)) == ErrorCode::DimensionMismatch);
}

TEST_CASE("filter_cloud keeps magnitudes inside the bounds") {
  MotionCloud c;
  c.frame_index = 3;
  for (double m : {1.0, 10.0, 1000.0}) c.points.push_back({{0.0, 0.0, 1000.0}, {0.0, m, 0.0}});
  const MotionCloud f = filter_cloud(c, 5.0, 500.0);
  REQUIRE(f.size() == 1u);
  CHECK(f.points[0].motion.y == 10.0);
  CHECK(f.frame_index == 3);

  const MotionCloud all = filter_cloud(c, 0.0);
  CHECK(all.points == c.points);

  MotionCloud still;
  still.points.assign(5, MotionPoint{{1.0, 2.0, 900.0}, {}});
  CHECK(filter_cloud(still, 0.5, 500.0).empty());

  // Inclusive at both ends.
  MotionCloud edge;
  edge.points = {{{}, {5.0, 0.0, 0.0}}, {{}, {0.0, 0.0, 500.0}}};
  CHECK(filter_cloud(edge, 5.0, 500.0).size() == 2u);

  CHECK_THROWS_AS(filter_cloud(c, 5.0, 5.0), Error);
  CHECK_THROWS_AS(filter_cloud(c, -1.0, 5.0), Error);
}
