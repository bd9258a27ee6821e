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
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "voxflow/common.hpp"
#include "voxflow/pipeline.hpp"
#include "voxflow/synth.hpp"

using namespace voxflow;

namespace {

double median(std::vector<double> v) {
  std::ranges::sort(v);
  return v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cameras") {
  const Intrinsics d = default_depth_camera();
  CHECK(d == Intrinsics{365.0, 365.0, 256.0, 212.0, 512, 424});
  const Intrinsics r = scaled_camera(d, 1024, 848);
  CHECK(r.fx == 730.0);
  CHECK(r.cx == 512.0);
  CHECK(r.cy == 424.0);
}

TEST_CASE("a translating plane has constant analytic motion") {
  const SynthScene scene = translating_plane_scene({50.0, 0.0, 0.0}, 1000.0, 3, 1);
  const RenderedVideo v = render(scene);
  REQUIRE(v.rgb.size() == 3u);
  REQUIRE(v.depth.size() == 3u);
  REQUIRE(v.gt_motion.size() == 2u);
  for (const auto& frame : v.gt_motion) {
    for (const Vec3& m : frame) {
      REQUIRE(m.finite());
      CHECK(std::abs(m.x - 50.0) < 1e-9);
      CHECK(std::abs(m.y) < 1e-9);
      CHECK(std::abs(m.z) < 1e-9);
    }
  }
  // Fronto-parallel plane at 1000 mm, 1 mm per raw unit.
  CHECK(std::ranges::all_of(v.depth[0].data, [](std::uint16_t d) { return d == 1000; }));
  CHECK(v.rig.rgb_to_depth_lut.lookup(10, 20) == PixelIndex{10, 20});
}

TEST_CASE("static scene has zero ground-truth motion") {
  SynthScene scene = subject_scene({}, 3, 4);
  const RenderedVideo v = render(scene);
  for (const auto& frame : v.gt_motion) {
    for (const Vec3& m : frame) {
      if (m.finite()) CHECK(m == Vec3{});
    }
  }
  CHECK(v.rgb[0].data == v.rgb[1].data);
  CHECK(v.depth[0].data == v.depth[2].data);
}

TEST_CASE("ground-truth points project onto the pixel that drew them") {
  SynthScene scene = subject_scene({{20.0, -10.0, 15.0}, 6.0}, 2, 8);
  const RenderedVideo v = render(scene);
  const Intrinsics& cam = scene.camera;
  int seen = 0;
  for (int w = 0; w < cam.height; w += 3) {
    for (int u = 0; u < cam.width; u += 3) {
      const Point3& p = v.gt_points[0][std::size_t(w) * cam.width + u];
      if (!p.finite()) continue;
      ++seen;
      const auto uv = project(p, cam);
      CHECK(std::abs(uv[0] - u) <= 0.5);
      CHECK(std::abs(uv[1] - w) <= 0.5);
      // Rendered depth is the point's z, rounded to whole raw units.
      CHECK(std::abs(v.depth[0].at(u, w) - p.z) <= 0.5 + 1e-9);
    }
  }
  CHECK(seen > 1000);
}

TEST_CASE("box faces and yaw") {
  SynthScene scene;
  scene.frames = 2;
  SynthObject box;
  box.kind = PrimitiveKind::Box;
  box.center = {0.0, 0.0, 2000.0};
  box.half_extent = {300.0, 300.0, 100.0};
  box.motion.yaw_rate_deg = 10.0;
  scene.objects.push_back(box);
  const RenderedVideo v = render(scene);
  CHECK(v.depth[0].at(256, 212) == 1900);
  // A point on the front face at the optical axis rotates about the box's
  // vertical axis: (0, 0, -100) offset -> R_y(10 deg) applied.
  const Vec3 m = v.gt_motion[0][std::size_t(212) * 512 + 256];
  const double t = 10.0 * std::numbers::pi / 180.0;
  CHECK(m.x == doctest::Approx(-100.0 * std::sin(t)));
  CHECK(m.y == doctest::Approx(0.0));
  CHECK(m.z == doctest::Approx(-100.0 * std::cos(t) + 100.0));
  // Pixels that see nothing have invalid depth and NaN truth.
  CHECK(v.depth[0].at(0, 0) == 0);
  CHECK_FALSE(v.gt_motion[0][0].finite());
}

TEST_CASE("z-buffering keeps the nearest surface") {
  SynthScene scene;
  SynthObject far_plane;
  far_plane.center = {0.0, 0.0, 3000.0};
  far_plane.half_extent = {5000.0, 5000.0, 0.0};
  SynthObject near_plane = far_plane;
  near_plane.center.z = 1500.0;
  near_plane.half_extent = {100.0, 100.0, 0.0};
  scene.objects = {far_plane, near_plane};
  const RenderedVideo v = render(scene);
  CHECK(v.depth[0].at(256, 212) == 1500);
  CHECK(v.depth[0].at(10, 10) == 3000);
}

TEST_CASE("scene validation") {
  auto code_of = [](const SynthScene& s) {
    try {
      s.validate();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::IoFailure;
  };
  SynthScene empty;
  CHECK(code_of(empty) == ErrorCode::EmptyScene);
  SynthScene near = translating_plane_scene({}, 400.0, 2, 1);
  CHECK(code_of(near) == ErrorCode::InvalidArgument);
  SynthScene drift = translating_plane_scene({0.0, 0.0, 400.0}, 7800.0, 3, 1);
  CHECK(code_of(drift) == ErrorCode::InvalidArgument);
  SynthScene fast = translating_plane_scene({600.0, 0.0, 0.0}, 2000.0, 2, 1);
  CHECK(code_of(fast) == ErrorCode::InvalidArgument);
  SynthScene wall;
  wall.background_depth_mm = 9000.0;
  CHECK(code_of(wall) == ErrorCode::InvalidArgument);
  wall.background_depth_mm = 3000.0;
  CHECK(code_of(wall) == ErrorCode::IoFailure);  // valid
  CHECK_THROWS_AS(render(empty), Error);
}

TEST_CASE("separate RGB resolution is registered through a co-located table") {
  SynthScene scene = subject_scene({{10.0, 0.0, 0.0}, 0.0}, 2, 3);
  scene.rgb_camera = scaled_camera(scene.camera, 640, 360);
  const RenderedVideo v = render(scene);
  CHECK(v.rgb[0].width == 640);
  CHECK(v.rgb[0].height == 360);
  CHECK(v.rig.rgb_to_depth_lut.rgb_width() == 640);
  CHECK(v.rig.rgb_to_depth_lut.lookup(320, 180) == PixelIndex{256, 212});
}

TEST_CASE("depth noise is seeded") {
  SynthScene scene = translating_plane_scene({}, 2000.0, 1, 1);
  scene.depth_noise_sigma_mm = 5.0;
  scene.noise_seed = 3;
  const RenderedVideo a = render(scene), b = render(scene);
  CHECK(a.depth[0].data == b.depth[0].data);
  double sum = 0.0, sq = 0.0;
  for (auto d : a.depth[0].data) {
    sum += d - 2000.0;
    sq += (d - 2000.0) * (d - 2000.0);
  }
  const double n = double(a.depth[0].data.size());
  CHECK(std::abs(sum / n) < 0.1);
  CHECK(std::sqrt(sq / n) == doctest::Approx(5.0).epsilon(0.05));
}

TEST_CASE("a plane approaching the camera is recovered by the pipeline") {
  const SynthScene scene = translating_plane_scene({0.0, 0.0, -30.0}, 1500.0, 2, 11);
  const RenderedVideo v = render(scene);
  PipelineConfig cfg;
  const MotionCloud cloud =
      pair_cloud(to_gray(v.rgb[0]), to_gray(v.rgb[1]), v.depth[0], v.depth[1], v.rig, cfg, 0);
  REQUIRE(cloud.size() > 1000u);
  std::vector<double> dz;
  for (const auto& p : cloud.points) dz.push_back(p.motion.z);
  CHECK(std::abs(median(dz) + 30.0) <= 5.0);
}

TEST_CASE("motion patterns") {
  CHECK(motion_pattern(0, 30.0, 5.0).velocity_mm == Vec3{30.0, 0.0, 0.0});
  CHECK(motion_pattern(1, 30.0, 5.0).velocity_mm == Vec3{-30.0, 0.0, 0.0});
  CHECK(motion_pattern(5, 30.0, 5.0).velocity_mm == Vec3{0.0, 0.0, -30.0});
  CHECK(motion_pattern(6, 30.0, 5.0).yaw_rate_deg == 5.0);
  CHECK(motion_pattern(8, 30.0, 5.0).velocity_mm.norm() == doctest::Approx(30.0));
  std::set<std::array<double, 4>> distinct;
  for (int k = 0; k < kMaxMotionClasses; ++k) {
    const RigidMotion m = motion_pattern(k, 30.0, 5.0);
    distinct.insert({m.velocity_mm.x, m.velocity_mm.y, m.velocity_mm.z, m.yaw_rate_deg});
  }
  CHECK(distinct.size() == std::size_t(kMaxMotionClasses));
  CHECK_THROWS_AS(motion_pattern(26, 30.0, 5.0), Error);
  CHECK_THROWS_AS(motion_pattern(-1, 30.0, 5.0), Error);
}

TEST_CASE("labeled set: left versus right") {
  const auto dir = testutil::scratch("labeled_lr");
  const auto records = make_labeled_set(2, 3, 42, dir);
  REQUIRE(records.size() == 6u);
  for (const auto& r : records) {
    const VxfRecord rec = read_vxf_file(r.path);
    CHECK(rec.meta.label == std::uint32_t(r.label));
    CHECK(rec.tensor.channels == 12);
    CHECK(rec.tensor.spec.dims == GridDims{24, 24, 24});
    double dx = 0.0;
    for (int pair = 0; pair < 4; ++pair) {
      for (std::size_t v = 0; v < rec.tensor.voxel_count(); ++v) dx += rec.tensor.at(3 * pair, v);
    }
    CAPTURE(r.path.string());
    if (r.label == 0) CHECK(dx > 0.0);
    else CHECK(dx < 0.0);
  }
  std::ifstream index(dir / "index.txt");
  std::string line;
  int lines = 0;
  while (std::getline(index, line)) {
    ++lines;
    CHECK(line.find(',') != std::string::npos);
  }
  CHECK(lines == 6);
}

TEST_CASE("labeled set: same seed, same bytes") {
  const auto a = testutil::scratch("labeled_a"), b = testutil::scratch("labeled_b");
  const auto ra = make_labeled_set(3, 2, 7, a);
  const auto rb = make_labeled_set(3, 2, 7, b);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) CHECK(slurp(ra[k].path) == slurp(rb[k].path));
  CHECK(slurp(a / "index.txt") == slurp(b / "index.txt"));
}

TEST_CASE("labeled set: 10 classes x 50 samples") {
  const auto dir = testutil::scratch("labeled_500");
  const auto records = make_labeled_set(10, 50, 1, dir);
  CHECK(records.size() == 500u);
  std::map<int, int> per_label;
  for (const auto& r : records) ++per_label[r.label];
  CHECK(per_label.size() == 10u);
  for (auto [label, count] : per_label) CHECK(count == 50);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().extension() == ".vxf";
  CHECK(files == 500u);
}

TEST_CASE("labeled set: bad class counts") {
  const auto dir = testutil::scratch("labeled_bad");
  CHECK_THROWS_AS(make_labeled_set(0, 1, 1, dir), Error);
  CHECK_THROWS_AS(make_labeled_set(27, 1, 1, dir), Error);
}
