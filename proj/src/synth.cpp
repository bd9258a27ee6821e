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

#include "voxflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "voxflow/augment.hpp"

namespace voxflow {

namespace {

constexpr double kMinSensorMm = 500.0;
constexpr double kMaxSensorMm = 8000.0;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double lattice(std::int64_t ix, std::int64_t iy, std::int64_t iz, std::uint64_t seed) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ std::uint64_t(ix));
  h = mix64(h ^ std::uint64_t(iy));
  h = mix64(h ^ std::uint64_t(iz));
  return double(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Trilinearly interpolated value noise in [0, 1].
double value_noise(const Vec3& p, std::uint64_t seed) {
  const double fx = std::floor(p.x), fy = std::floor(p.y), fz = std::floor(p.z);
  const auto ix = std::int64_t(fx), iy = std::int64_t(fy), iz = std::int64_t(fz);
  const double tx = smooth(p.x - fx), ty = smooth(p.y - fy), tz = smooth(p.z - fz);
  double acc = 0.0;
  for (int c = 0; c < 8; ++c) {
    const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
    const double w = (dx ? tx : 1.0 - tx) * (dy ? ty : 1.0 - ty) * (dz ? tz : 1.0 - tz);
    acc += w * lattice(ix + dx, iy + dy, iz + dz, seed);
  }
  return acc;
}

// Four octaves, finest first; the coarse octaves keep texture visible at the
// coarse flow pyramid levels.
double texture(const Vec3& local, std::uint64_t seed, double cell_mm) {
  static constexpr double kWeights[4] = {0.4, 0.3, 0.2, 0.1};
  double lum = 0.0;
  double cell = cell_mm;
  for (int o = 0; o < 4; ++o) {
    lum += kWeights[o] * value_noise(local * (1.0 / cell), seed * 4 + std::uint64_t(o));
    cell *= 2.0;
  }
  return 0.1 + 0.8 * lum;
}

struct Hit {
  double z = std::numeric_limits<double>::infinity();  // ray parameter == camera Z
  Vec3 local;
  int object = -1;  // -1 background
};

std::optional<std::pair<double, Vec3>> intersect(const SynthObject& obj, const Vec3& dir, int t) {
  const Vec3 o = obj.to_local({0.0, 0.0, 0.0}, t);
  const Vec3 d = rotate_about_vertical(dir, -obj.yaw_at(t));
  const Vec3& h = obj.half_extent;
  if (obj.kind == PrimitiveKind::Plane) {
    if (std::abs(d.z) < 1e-12) return std::nullopt;
    const double s = -o.z / d.z;
    if (!(s > 0.0)) return std::nullopt;
    const Vec3 p = o + d * s;
    if (std::abs(p.x) > h.x || std::abs(p.y) > h.y) return std::nullopt;
    return std::make_pair(s, Vec3{p.x, p.y, 0.0});
  }
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  const double oo[3] = {o.x, o.y, o.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double hh[3] = {h.x, h.y, h.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dd[a]) < 1e-15) {
      if (std::abs(oo[a]) > hh[a]) return std::nullopt;
      continue;
    }
    double t0 = (-hh[a] - oo[a]) / dd[a];
    double t1 = (hh[a] - oo[a]) / dd[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
  }
  if (!(t_near <= t_far) || !(t_near > 0.0)) return std::nullopt;
  return std::make_pair(t_near, o + d * t_near);
}

Hit cast(const SynthScene& scene, const Vec3& dir, int t) {
  Hit best;
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    const auto h = intersect(scene.objects[k], dir, t);
    if (h && h->first < best.z) {
      best.z = h->first;
      best.local = h->second;
      best.object = int(k);
    }
  }
  if (best.object < 0 && scene.background_depth_mm) {
    best.z = *scene.background_depth_mm;
    best.local = dir * best.z;
  }
  return best;
}

Vec3 ray(const Intrinsics& intr, int u, int w) {
  return {(u - intr.cx) / intr.fx, (w - intr.cy) / intr.fy, 1.0};
}

double gaussian(std::mt19937_64& rng) {
  auto unit = [&] { return (double(rng() >> 11) + 0.5) * 0x1.0p-53; };
  return std::sqrt(-2.0 * std::log(unit())) * std::cos(2.0 * std::numbers::pi * unit());
}

}  // namespace

Point3 SynthObject::to_world(const Vec3& local, int t) const {
  return rotate_about_vertical(local, yaw_at(t)) + center_at(t);
}

Vec3 SynthObject::to_local(const Point3& world, int t) const {
  return rotate_about_vertical(world - center_at(t), -yaw_at(t));
}

Intrinsics default_depth_camera() { return {365.0, 365.0, 256.0, 212.0, 512, 424}; }

Intrinsics scaled_camera(const Intrinsics& depth, int width, int height) {
  const double s = double(width) / depth.width;
  Intrinsics out;
  out.fx = depth.fx * s;
  out.fy = depth.fy * s;
  out.cx = depth.cx * s;
  out.cy = depth.cy * double(height) / depth.height;
  out.width = width;
  out.height = height;
  return out;
}

void SynthScene::validate() const {
  if (objects.empty() && !background_depth_mm) throw Error(ErrorCode::EmptyScene, "scene has nothing to render");
  if (frames < 1) throw Error(ErrorCode::InvalidArgument, "scene needs at least one frame");
  camera.validate();
  if (rgb_camera) rgb_camera->validate();
  if (!(depth_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "depth_scale must be positive");
  auto in_range = [](double z) { return z >= kMinSensorMm && z <= kMaxSensorMm; };
  if (background_depth_mm && !in_range(*background_depth_mm)) {
    throw Error(ErrorCode::InvalidArgument, "background depth outside the 500-8000 mm sensor range");
  }
  for (const auto& obj : objects) {
    if (obj.motion.velocity_mm.norm() > max_speed) {
      throw Error(ErrorCode::InvalidArgument, "object speed exceeds max_speed");
    }
    if (!(obj.texture_cell_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "texture cell must be positive");
    for (int t = 0; t < frames; ++t) {
      if (!in_range(obj.center_at(t).z)) {
        throw Error(ErrorCode::InvalidArgument,
                    "object depth leaves the 500-8000 mm sensor range at frame " + std::to_string(t));
      }
    }
  }
}

RenderedVideo render(const SynthScene& scene) {
  scene.validate();
  const Intrinsics& dcam = scene.camera;
  const Intrinsics rcam = scene.rgb_camera.value_or(dcam);

  RenderedVideo out;
  out.rig.depth_intrinsics = dcam;
  out.rig.depth_scale = scene.depth_scale;
  out.rig.rgb_to_depth_lut = rcam == dcam ? RegistrationLut::identity(dcam.width, dcam.height)
                                          : RegistrationLut::colocated(rcam, dcam);
  const double mm_per_unit = scene.depth_scale * 1000.0;
  std::mt19937_64 noise(scene.noise_seed);

  for (int t = 0; t < scene.frames; ++t) {
    RgbFrame rgb(rcam.width, rcam.height);
    for (int w = 0; w < rcam.height; ++w) {
      for (int u = 0; u < rcam.width; ++u) {
        const Hit hit = cast(scene, ray(rcam, u, w), t);
        std::uint8_t* px = rgb.at(u, w);
        if (!std::isfinite(hit.z)) continue;
        if (hit.object < 0) {
          const double lum = texture(hit.local, scene.background_seed, 40.0);
          px[0] = px[1] = px[2] = std::uint8_t(std::lround(255.0 * 0.8 * lum));
          continue;
        }
        const SynthObject& obj = scene.objects[hit.object];
        const double lum = texture(hit.local, obj.texture_seed, obj.texture_cell_mm);
        for (int c = 0; c < 3; ++c) px[c] = std::uint8_t(std::lround(255.0 * std::clamp(lum * obj.tint[c], 0.0, 1.0)));
      }
    }
    out.rgb.push_back(std::move(rgb));

    DepthFrame depth(dcam.width, dcam.height);
    std::vector<Vec3> motion(std::size_t(dcam.width) * dcam.height, Vec3{kNaN, kNaN, kNaN});
    std::vector<Point3> points(motion.size(), Vec3{kNaN, kNaN, kNaN});
    for (int w = 0; w < dcam.height; ++w) {
      for (int u = 0; u < dcam.width; ++u) {
        const Vec3 dir = ray(dcam, u, w);
        const Hit hit = cast(scene, dir, t);
        if (!std::isfinite(hit.z)) continue;
        double z = hit.z;
        if (scene.depth_noise_sigma_mm > 0.0) z += scene.depth_noise_sigma_mm * gaussian(noise);
        const double raw = std::floor(z / mm_per_unit + 0.5);
        depth.at(u, w) = raw >= 1.0 && raw < 65535.0 ? std::uint16_t(raw) : 0;

        const std::size_t k = std::size_t(w) * dcam.width + u;
        const Point3 world = dir * hit.z;
        points[k] = world;
        if (hit.object < 0) {
          motion[k] = {};
        } else {
          const SynthObject& obj = scene.objects[hit.object];
          motion[k] = obj.to_world(hit.local, t + 1) - obj.to_world(hit.local, t);
        }
      }
    }
    out.depth.push_back(std::move(depth));
    if (t + 1 < scene.frames) {
      out.gt_motion.push_back(std::move(motion));
      out.gt_points.push_back(std::move(points));
    }
  }
  return out;
}

SynthScene translating_plane_scene(const Vec3& velocity, double depth_mm, int frames,
                                   std::uint64_t seed) {
  SynthScene scene;
  scene.frames = frames;
  const Intrinsics& cam = scene.camera;
  SynthObject plane;
  plane.kind = PrimitiveKind::Plane;
  plane.center = {0.0, 0.0, depth_mm};
  const double travel = velocity.norm() * std::max(frames, 1);
  const double reach = depth_mm + travel;
  plane.half_extent = {reach * cam.width / cam.fx + travel + 100.0,
                       reach * cam.height / cam.fy + travel + 100.0, 0.0};
  plane.motion.velocity_mm = velocity;
  plane.texture_seed = mix64(seed);
  plane.texture_cell_mm = 3.5 * depth_mm / cam.fx;
  scene.objects.push_back(plane);
  return scene;
}

SynthScene subject_scene(const RigidMotion& motion, int frames, std::uint64_t seed) {
  SynthScene scene;
  scene.frames = frames;
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53); };

  SynthObject box;
  box.kind = PrimitiveKind::Box;
  box.center = {uni(-150.0, 150.0), uni(-100.0, 100.0), uni(1800.0, 2200.0)};
  box.half_extent = {uni(200.0, 300.0), uni(350.0, 450.0), uni(120.0, 200.0)};
  box.yaw_deg = uni(-20.0, 20.0);
  box.motion = motion;
  box.texture_seed = rng();
  box.texture_cell_mm = 3.5 * box.center.z / scene.camera.fx;
  box.tint = {uni(0.7, 1.0), uni(0.7, 1.0), uni(0.7, 1.0)};
  scene.objects.push_back(box);
  scene.background_depth_mm = 3500.0;
  scene.background_seed = rng();
  return scene;
}

RigidMotion motion_pattern(int label, double speed_mm, double yaw_rate_deg) {
  if (label < 0 || label >= kMaxMotionClasses) {
    throw Error(ErrorCode::InvalidArgument, "motion class " + std::to_string(label) + " out of range");
  }
  const double s = speed_mm;
  const double d = speed_mm / std::numbers::sqrt2;  // diagonal composites keep the speed
  const double r = yaw_rate_deg;
  struct Pattern { double x, y, z, yaw; };
  static constexpr Pattern kUnit[kMaxMotionClasses] = {
      {1, 0, 0, 0},  {-1, 0, 0, 0}, {0, 1, 0, 0},  {0, -1, 0, 0}, {0, 0, 1, 0},  {0, 0, -1, 0},
      {0, 0, 0, 1},  {0, 0, 0, -1},
      {2, 2, 0, 0},  {2, -2, 0, 0}, {-2, 2, 0, 0}, {-2, -2, 0, 0},
      {2, 0, 2, 0},  {2, 0, -2, 0}, {-2, 0, 2, 0}, {-2, 0, -2, 0},
      {0, 2, 2, 0},  {0, 2, -2, 0}, {0, -2, 2, 0}, {0, -2, -2, 0},
      {1, 0, 0, 1},  {-1, 0, 0, 1}, {1, 0, 0, -1}, {-1, 0, 0, -1},
      {0, 1, 0, 1},  {0, -1, 0, -1},
  };
  // 2 marks a diagonal component.
  auto comp = [&](double u) { return std::abs(u) == 2 ? (u > 0 ? d : -d) : u * s; };
  const Pattern& p = kUnit[label];
  return {{comp(p.x), comp(p.y), comp(p.z)}, p.yaw * r};
}

}  // namespace voxflow
