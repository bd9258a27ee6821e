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

// Depth-camera model and RGB -> depth pixel registration.
//
// Pixel convention: u is the column (x), w is the row (y). The same holds for
// RGB pixels (i = column, j = row). All geometry is in millimeters.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "voxflow/common.hpp"

namespace voxflow {

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point lies
  /// inside the image.
  void validate() const;

  bool contains(int u, int w) const { return u >= 0 && w >= 0 && u < width && w < height; }

  bool operator==(const Intrinsics&) const = default;
};

struct PixelIndex {
  int u = 0;
  int w = 0;
  bool operator==(const PixelIndex&) const = default;
};

/// Precomputed map from every RGB pixel to a depth pixel, or to "unmapped".
/// Stored as (u, w) pairs of 16-bit values in row-major RGB order, the same
/// layout as the on-disk binary table.
class RegistrationLut {
 public:
  static constexpr std::uint16_t kUnmapped = 0xFFFF;

  RegistrationLut() = default;

  /// Co-located cameras with equal resolution.
  static RegistrationLut identity(int width, int height);

  /// u = round(su * i + du), w = round(sw * j + dw). Entries that fall
  /// outside the depth image become unmapped.
  static RegistrationLut affine(int rgb_width, int rgb_height, int depth_width,
                                int depth_height, double du, double dw,
                                double su = 1.0, double sw = 1.0);

  /// Two pinhole cameras sharing an optical center: the mapping is
  /// depth-independent and reduces to an affine table.
  static RegistrationLut colocated(const Intrinsics& rgb, const Intrinsics& depth);

  /// Takes ownership of raw (u, w) pairs; validates every mapped entry.
  static RegistrationLut from_pairs(int rgb_width, int rgb_height, int depth_width,
                                    int depth_height, std::vector<std::uint16_t> pairs);

  static RegistrationLut load_binary(const std::filesystem::path& path, int rgb_width,
                                     int rgb_height, int depth_width, int depth_height);
  void save_binary(const std::filesystem::path& path) const;

  /// Throws OutOfBounds for pixels outside the RGB frame.
  std::optional<PixelIndex> lookup(int i, int j) const;

  /// No bounds check; caller guarantees 0 <= i < rgb_width, 0 <= j < rgb_height.
  std::optional<PixelIndex> lookup_unchecked(int i, int j) const noexcept {
    const std::size_t k = (std::size_t(j) * rgb_width_ + i) * 2;
    if (pairs_[k] == kUnmapped) return std::nullopt;
    return PixelIndex{pairs_[k], pairs_[k + 1]};
  }

  int rgb_width() const { return rgb_width_; }
  int rgb_height() const { return rgb_height_; }
  std::span<const std::uint16_t> pairs() const { return pairs_; }

 private:
  int rgb_width_ = 0;
  int rgb_height_ = 0;
  std::vector<std::uint16_t> pairs_;
};

struct CameraRig {
  Intrinsics depth_intrinsics;
  RegistrationLut rgb_to_depth_lut;
  double depth_scale = 0.001;    // meters per raw unit
  double max_depth_mm = 10000.0; // readings beyond this are treated as invalid

  void validate() const;

  double depth_mm(std::uint16_t raw) const { return double(raw) * depth_scale * 1000.0; }
  bool valid_depth(std::uint16_t raw) const {
    return raw != 0 && depth_mm(raw) <= max_depth_mm;
  }
};

/// Pinhole back-projection of a pixel at a metric depth.
inline Point3 backproject(double u, double w, double depth_mm, const Intrinsics& intr) noexcept {
  return {(u - intr.cx) * depth_mm / intr.fx, (w - intr.cy) * depth_mm / intr.fy, depth_mm};
}

/// Back-projection of a raw sensor reading. Throws InvalidDepth for the
/// invalid code or readings past the sensor max, OutOfBounds for pixels
/// outside the depth image.
Point3 backproject(PixelIndex pixel, std::uint16_t raw_depth, const CameraRig& rig);

/// Continuous pixel coordinates (u, w). Throws NonPositiveDepth when z <= 0.
std::array<double, 2> project(const Point3& p, const Intrinsics& intr);

/// Constant-time LUT read; nullopt when the RGB pixel has no depth partner.
std::optional<PixelIndex> register_rgb_pixel(PixelIndex rgb_pixel, const CameraRig& rig);

/// Reads the JSON calibration document. A relative binary LUT path is
/// resolved against the calibration file's directory.
CameraRig load_calibration(const std::filesystem::path& path);

/// Writes a calibration document whose LUT is stored next to it as
/// `<stem>.lut.bin`, unless the LUT is an identity map.
void save_calibration(const std::filesystem::path& path, const CameraRig& rig);

}  // namespace voxflow
