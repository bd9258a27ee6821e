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

#include "voxflow/calib.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "le_io.hpp"

namespace voxflow {

namespace fs = std::filesystem;
using nlohmann::json;

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  }
  if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
    throw Error(ErrorCode::InvalidArgument, "principal point outside the image");
  }
}

RegistrationLut RegistrationLut::identity(int width, int height) {
  return affine(width, height, width, height, 0.0, 0.0);
}

RegistrationLut RegistrationLut::affine(int rgb_width, int rgb_height, int depth_width,
                                        int depth_height, double du, double dw, double su,
                                        double sw) {
  if (rgb_width <= 0 || rgb_height <= 0 || depth_width <= 0 || depth_height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "LUT dimensions must be positive");
  }
  if (depth_width >= kUnmapped || depth_height >= kUnmapped) {
    throw Error(ErrorCode::InvalidArgument, "depth image too large for a 16-bit LUT");
  }
  RegistrationLut lut;
  lut.rgb_width_ = rgb_width;
  lut.rgb_height_ = rgb_height;
  lut.pairs_.resize(std::size_t(rgb_width) * rgb_height * 2);
  for (int j = 0; j < rgb_height; ++j) {
    const double w = std::floor(sw * j + dw + 0.5);
    for (int i = 0; i < rgb_width; ++i) {
      const double u = std::floor(su * i + du + 0.5);
      const std::size_t k = (std::size_t(j) * rgb_width + i) * 2;
      if (u >= 0 && w >= 0 && u < depth_width && w < depth_height) {
        lut.pairs_[k] = std::uint16_t(u);
        lut.pairs_[k + 1] = std::uint16_t(w);
      } else {
        lut.pairs_[k] = kUnmapped;
        lut.pairs_[k + 1] = kUnmapped;
      }
    }
  }
  return lut;
}

RegistrationLut RegistrationLut::colocated(const Intrinsics& rgb, const Intrinsics& depth) {
  rgb.validate();
  depth.validate();
  const double su = depth.fx / rgb.fx;
  const double sw = depth.fy / rgb.fy;
  return affine(rgb.width, rgb.height, depth.width, depth.height, depth.cx - su * rgb.cx,
                depth.cy - sw * rgb.cy, su, sw);
}

RegistrationLut RegistrationLut::from_pairs(int rgb_width, int rgb_height, int depth_width,
                                            int depth_height, std::vector<std::uint16_t> pairs) {
  if (rgb_width <= 0 || rgb_height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "LUT dimensions must be positive");
  }
  if (pairs.size() != std::size_t(rgb_width) * rgb_height * 2) {
    throw Error(ErrorCode::DimensionMismatch, "LUT has " + std::to_string(pairs.size() / 2) +
                                                  " entries, expected " +
                                                  std::to_string(std::size_t(rgb_width) * rgb_height));
  }
  for (std::size_t k = 0; k < pairs.size(); k += 2) {
    const bool unmapped = pairs[k] == kUnmapped && pairs[k + 1] == kUnmapped;
    if (unmapped) continue;
    if (pairs[k] >= depth_width || pairs[k + 1] >= depth_height) {
      throw Error(ErrorCode::OutOfBounds, "LUT entry " + std::to_string(k / 2) +
                                              " maps outside the depth image");
    }
  }
  RegistrationLut lut;
  lut.rgb_width_ = rgb_width;
  lut.rgb_height_ = rgb_height;
  lut.pairs_ = std::move(pairs);
  return lut;
}

RegistrationLut RegistrationLut::load_binary(const fs::path& path, int rgb_width, int rgb_height,
                                             int depth_width, int depth_height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open LUT " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() % 2 != 0) {
    throw Error(ErrorCode::CorruptPayload, "LUT " + path.string() + " has odd byte length");
  }
  std::vector<std::uint16_t> pairs(bytes.size() / 2);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    pairs[k] = detail::get_le<std::uint16_t>(bytes.data() + 2 * k);
  }
  return from_pairs(rgb_width, rgb_height, depth_width, depth_height, std::move(pairs));
}

void RegistrationLut::save_binary(const fs::path& path) const {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(pairs_.size() * 2);
  for (auto v : pairs_) detail::put_le(bytes, v);
  std::ofstream out(path, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write LUT " + path.string());
}

std::optional<PixelIndex> RegistrationLut::lookup(int i, int j) const {
  if (i < 0 || j < 0 || i >= rgb_width_ || j >= rgb_height_) {
    throw Error(ErrorCode::OutOfBounds, "RGB pixel (" + std::to_string(i) + ", " +
                                            std::to_string(j) + ") outside the frame");
  }
  return lookup_unchecked(i, j);
}

void CameraRig::validate() const {
  depth_intrinsics.validate();
  if (!(depth_scale > 0.0)) throw Error(ErrorCode::InvalidArgument, "depth_scale must be positive");
  if (!(max_depth_mm > 0.0)) throw Error(ErrorCode::InvalidArgument, "max_depth_mm must be positive");
  if (rgb_to_depth_lut.rgb_width() <= 0) {
    throw Error(ErrorCode::InvalidArgument, "camera rig has no registration LUT");
  }
}

Point3 backproject(PixelIndex pixel, std::uint16_t raw_depth, const CameraRig& rig) {
  if (!rig.depth_intrinsics.contains(pixel.u, pixel.w)) {
    throw Error(ErrorCode::OutOfBounds, "depth pixel outside the image");
  }
  if (!rig.valid_depth(raw_depth)) {
    throw Error(ErrorCode::InvalidDepth, "raw depth " + std::to_string(raw_depth) + " at (" +
                                             std::to_string(pixel.u) + ", " +
                                             std::to_string(pixel.w) + ")");
  }
  return backproject(double(pixel.u), double(pixel.w), rig.depth_mm(raw_depth),
                     rig.depth_intrinsics);
}

std::array<double, 2> project(const Point3& p, const Intrinsics& intr) {
  if (!(p.z > 0.0)) throw Error(ErrorCode::NonPositiveDepth, "cannot project a point with z <= 0");
  return {p.x * intr.fx / p.z + intr.cx, p.y * intr.fy / p.z + intr.cy};
}

std::optional<PixelIndex> register_rgb_pixel(PixelIndex rgb_pixel, const CameraRig& rig) {
  return rig.rgb_to_depth_lut.lookup(rgb_pixel.u, rgb_pixel.w);
}

namespace {

Intrinsics intrinsics_from_json(const json& j) {
  Intrinsics intr;
  intr.fx = j.at("fx").get<double>();
  intr.fy = j.at("fy").get<double>();
  intr.cx = j.at("cx").get<double>();
  intr.cy = j.at("cy").get<double>();
  intr.width = j.at("width").get<int>();
  intr.height = j.at("height").get<int>();
  return intr;
}

}  // namespace

CameraRig load_calibration(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open calibration file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }

  CameraRig rig;
  try {
    rig.depth_intrinsics = intrinsics_from_json(doc.at("depth_intrinsics"));
    rig.depth_scale = doc.value("depth_scale", 0.001);
    rig.max_depth_mm = doc.value("max_depth_mm", 10000.0);
    rig.depth_intrinsics.validate();

    int rgb_w = rig.depth_intrinsics.width;
    int rgb_h = rig.depth_intrinsics.height;
    if (doc.contains("rgb_size")) {
      rgb_w = doc["rgb_size"].at("width").get<int>();
      rgb_h = doc["rgb_size"].at("height").get<int>();
    }
    const int dw = rig.depth_intrinsics.width;
    const int dh = rig.depth_intrinsics.height;

    const json& lut = doc.at("lut");
    if (lut.is_string() && lut.get<std::string>() == "identity") {
      if (rgb_w != dw || rgb_h != dh) {
        throw Error(ErrorCode::ConfigError, "identity LUT requires equal RGB and depth sizes");
      }
      rig.rgb_to_depth_lut = RegistrationLut::identity(dw, dh);
    } else if (lut.is_string()) {
      fs::path lut_path = lut.get<std::string>();
      if (lut_path.is_relative()) lut_path = path.parent_path() / lut_path;
      rig.rgb_to_depth_lut = RegistrationLut::load_binary(lut_path, rgb_w, rgb_h, dw, dh);
    } else if (lut.is_object()) {
      rig.rgb_to_depth_lut = RegistrationLut::affine(
          rgb_w, rgb_h, dw, dh, lut.at("du").get<double>(), lut.at("dw").get<double>(),
          lut.value("su", 1.0), lut.value("sw", 1.0));
    } else {
      throw Error(ErrorCode::ConfigError, "lut must be \"identity\", an affine object or a path");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::IoFailure) throw;
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.message());
  }
  rig.validate();
  return rig;
}

void save_calibration(const fs::path& path, const CameraRig& rig) {
  const auto& intr = rig.depth_intrinsics;
  json doc;
  doc["depth_intrinsics"] = {{"fx", intr.fx}, {"fy", intr.fy}, {"cx", intr.cx},
                             {"cy", intr.cy}, {"width", intr.width}, {"height", intr.height}};
  doc["depth_scale"] = rig.depth_scale;
  doc["max_depth_mm"] = rig.max_depth_mm;
  const auto& lut = rig.rgb_to_depth_lut;
  doc["rgb_size"] = {{"width", lut.rgb_width()}, {"height", lut.rgb_height()}};

  const bool same_size = lut.rgb_width() == intr.width && lut.rgb_height() == intr.height;
  if (same_size && std::ranges::equal(lut.pairs(),
                                      RegistrationLut::identity(intr.width, intr.height).pairs())) {
    doc["lut"] = "identity";
  } else {
    const fs::path lut_name = path.stem().string() + ".lut.bin";
    lut.save_binary(path.parent_path() / lut_name);
    doc["lut"] = lut_name.string();
  }
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write calibration file " + path.string());
}

}  // namespace voxflow
