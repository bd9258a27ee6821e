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

#include "voxflow/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace voxflow {

namespace {

constexpr double kFixedPointScale = 1048576.0;  // 2^20 units per mm
constexpr double kDegenerateHalfWidth = 50.0;   // mm, for zero-extent axes

double axis(const Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); }
double& axis(Vec3& v, int a) { return a == 0 ? v.x : (a == 1 ? v.y : v.z); }

// Linear-interpolated quantile; reorders `values`.
double quantile(std::vector<double>& values, double q) {
  const double pos = q * double(values.size() - 1);
  const std::size_t lo = std::size_t(std::floor(pos));
  std::nth_element(values.begin(), values.begin() + lo, values.end());
  const double v_lo = values[lo];
  if (lo + 1 >= values.size()) return v_lo;
  const double frac = pos - double(lo);
  if (frac == 0.0) return v_lo;
  const double v_hi = *std::min_element(values.begin() + lo + 1, values.end());
  return v_lo + frac * (v_hi - v_lo);
}

double float_floor(double v) {
  float f = float(v);
  if (double(f) > v) f = std::nextafter(f, -std::numeric_limits<float>::infinity());
  return f;
}

double float_ceil(double v) {
  float f = float(v);
  if (double(f) < v) f = std::nextafter(f, std::numeric_limits<float>::infinity());
  return f;
}

}  // namespace

void GridSpec::validate() const {
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) throw Error(ErrorCode::InvalidArgument, "grid dims must be >= 1");
    if (!(axis(bounds_max, a) > axis(bounds_min, a))) {
      throw Error(ErrorCode::InvalidArgument, "grid bounds must satisfy max > min on every axis");
    }
  }
}

Vec3 GridSpec::scale() const {
  return {(bounds_max.x - bounds_min.x) / dims[0], (bounds_max.y - bounds_min.y) / dims[1],
          (bounds_max.z - bounds_min.z) / dims[2]};
}

std::optional<std::size_t> GridSpec::voxel_of(const Point3& p) const {
  const Vec3 s = scale();
  std::array<int, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double v = axis(p, a);
    const double lo = axis(bounds_min, a);
    if (!(v >= lo && v < axis(bounds_max, a))) return std::nullopt;
    // Rounding can push a point just below max onto index dims.
    idx[a] = std::min(int(std::floor((v - lo) / axis(s, a))), dims[a] - 1);
  }
  return (std::size_t(idx[0]) * dims[1] + idx[1]) * dims[2] + idx[2];
}

Point3 GridSpec::voxel_center(int ix, int iy, int iz) const {
  const Vec3 s = scale();
  return {bounds_min.x + (ix + 0.5) * s.x, bounds_min.y + (iy + 0.5) * s.y,
          bounds_min.z + (iz + 0.5) * s.z};
}

GridSpec fit_grid(std::span<const MotionCloud> clouds, GridDims dims, double percentile) {
  if (!(percentile > 0.5 && percentile <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "percentile must lie in (0.5, 1]");
  }
  std::size_t total = 0;
  for (const auto& c : clouds) total += c.size();
  if (total == 0) throw Error(ErrorCode::EmptyInput, "no points to fit a grid to");

  GridSpec spec;
  spec.dims = dims;
  std::vector<double> coords(total);
  for (int a = 0; a < 3; ++a) {
    std::size_t k = 0;
    for (const auto& c : clouds) {
      for (const auto& p : c.points) coords[k++] = axis(p.position, a);
    }
    double lo = quantile(coords, 1.0 - percentile);
    double hi = quantile(coords, percentile);
    const double extent = hi - lo;
    if (extent > 0.0) {
      lo -= 0.05 * extent;
      hi += 0.05 * extent;
    } else {
      lo -= kDegenerateHalfWidth;
      hi += kDegenerateHalfWidth;
    }
    axis(spec.bounds_min, a) = float_floor(lo);
    axis(spec.bounds_max, a) = float_ceil(hi);
  }
  spec.validate();
  return spec;
}

VoxelizedPair voxelize_pair(const MotionCloud& cloud, const GridSpec& spec) {
  spec.validate();
  const std::size_t n = spec.voxel_count();
  VoxelizedPair out;
  out.spec = spec;
  out.planes.assign(3 * n, 0.0f);
  out.occupancy.assign(n, 0);

  std::vector<std::int64_t> sums(3 * n, 0);
  for (const auto& p : cloud.points) {
    if (!p.motion.finite()) continue;
    const auto v = spec.voxel_of(p.position);
    if (!v) continue;
    ++out.occupancy[*v];
    for (int a = 0; a < 3; ++a) sums[a * n + *v] += std::llround(axis(p.motion, a) * kFixedPointScale);
  }

  const Vec3 s = spec.scale();
  for (std::size_t v = 0; v < n; ++v) {
    if (out.occupancy[v] == 0) continue;
    for (int a = 0; a < 3; ++a) {
      const double mean_mm = double(sums[a * n + v]) / kFixedPointScale / out.occupancy[v];
      out.planes[a * n + v] = float(mean_mm / axis(s, a));
    }
  }
  return out;
}

bool SnippetTensor::same_values(const SnippetTensor& other) const {
  return spec == other.spec && channels == other.channels && values == other.values;
}

SnippetTensor assemble_snippet(std::span<const VoxelizedPair> pairs, bool pad_last) {
  if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "a snippet needs at least one pair");
  const GridSpec& spec = pairs.front().spec;
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    if (!(pairs[k].spec == spec)) {
      throw Error(ErrorCode::SpecMismatch, "pair " + std::to_string(k) + " uses a different grid");
    }
  }
  const std::size_t n = spec.voxel_count();
  const std::size_t slots = pairs.size() + (pad_last ? 1 : 0);

  SnippetTensor t;
  t.spec = spec;
  t.channels = int(3 * slots);
  t.values.reserve(3 * slots * n);
  t.occupancy.reserve(slots * n);
  for (std::size_t k = 0; k < slots; ++k) {
    const VoxelizedPair& p = pairs[std::min(k, pairs.size() - 1)];
    if (p.planes.size() != 3 * n || p.occupancy.size() != n) {
      throw Error(ErrorCode::SpecMismatch, "pair " + std::to_string(k) + " has the wrong size");
    }
    t.values.insert(t.values.end(), p.planes.begin(), p.planes.end());
    t.occupancy.insert(t.occupancy.end(), p.occupancy.begin(), p.occupancy.end());
  }
  return t;
}

}  // namespace voxflow
