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

// Persistence: VXF snippet records, PLY motion clouds, RGB-D frame folders.
//
// VXF layout, little-endian throughout (72-byte header):
//
//   offset size
//        0    4  magic "VXF1"
//        4    2  u16 version = 1
//        6    2  u16 flags, bit0 = sparse payload
//        8    4  u32 label
//       12    4  u32 snippet_index
//       16    6  u16 dims[3] (X, Y, Z)
//       22    2  u16 channels
//       24   24  f32 bounds[6] (min x, y, z, max x, y, z) in mm
//       48   16  f32 aug[4] (tx, ty, tz as grid fractions, rotation degrees)
//       64    8  u64 payload_count
//       72       payload
//
// Dense payload: payload_count = X*Y*Z*channels f32 values, channel-major,
// then x, y, z row-major. Sparse payload: payload_count entries of
// (u32 linear voxel index, f32 x channels), indices strictly increasing;
// linear index = (x * Y + y) * Z + z. A voxel is stored when any of its
// channel values has a nonzero bit pattern.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "voxflow/augment.hpp"
#include "voxflow/frames.hpp"
#include "voxflow/lift3d.hpp"
#include "voxflow/voxelizer.hpp"

namespace voxflow {

inline constexpr std::size_t kVxfHeaderSize = 72;
inline constexpr std::uint16_t kVxfVersion = 1;

struct VxfMeta {
  std::uint32_t label = 0;
  std::uint32_t snippet_index = 0;
  Vec3 aug_translation_frac;
  double aug_rotation_deg = 0.0;

  bool operator==(const VxfMeta&) const = default;
};

enum class VxfEncoding { Auto, Dense, Sparse };

struct VxfRecord {
  SnippetTensor tensor;
  VxfMeta meta;
  bool sparse = false;
};

/// Number of voxels with at least one nonzero channel value.
std::size_t count_nonzero_voxels(const SnippetTensor& tensor);

/// Auto picks sparse when nonzero voxels are under 10% of the grid.
bool choose_sparse(const SnippetTensor& tensor);

/// Streams a record; memory beyond the tensor itself is O(1).
void write_vxf(std::ostream& out, const SnippetTensor& tensor, const VxfMeta& meta,
               VxfEncoding encoding = VxfEncoding::Auto);
std::vector<std::uint8_t> encode_vxf(const SnippetTensor& tensor, const VxfMeta& meta,
                                     VxfEncoding encoding = VxfEncoding::Auto);
/// Throws IoFailure when the file cannot be written.
void write_vxf_file(const std::filesystem::path& path, const SnippetTensor& tensor,
                    const VxfMeta& meta, VxfEncoding encoding = VxfEncoding::Auto);

/// Throws BadMagic, UnsupportedVersion, or CorruptPayload (with the byte
/// offset where decoding failed).
VxfRecord read_vxf(std::span<const std::uint8_t> bytes);
VxfRecord read_vxf_file(const std::filesystem::path& path);

enum class PlyFormat { Ascii, BinaryLittleEndian };

/// Vertices carry float x, y, z (mm) and float dx, dy, dz (mm) properties.
/// Throws EmptyCloud for an empty cloud.
void export_ply(std::ostream& out, const MotionCloud& cloud, PlyFormat format = PlyFormat::Ascii);
void export_ply_file(const std::filesystem::path& path, const MotionCloud& cloud,
                     PlyFormat format = PlyFormat::Ascii);

/// Reads ASCII or binary little-endian PLY vertices with x, y, z and
/// optional dx, dy, dz properties (float or double). Throws DecodeError.
MotionCloud read_ply(std::istream& in);
MotionCloud read_ply_file(const std::filesystem::path& path);

struct RgbdFrame {
  RgbFrame rgb;
  DepthFrame depth;
};

/// Random-access RGB-D video.
class VideoSource {
 public:
  virtual ~VideoSource() = default;
  virtual int frame_count() const = 0;
  virtual RgbFrame rgb(int t) const = 0;
  virtual DepthFrame depth(int t) const = 0;
  RgbdFrame frame(int t) const { return {rgb(t), depth(t)}; }
};

class MemoryVideo : public VideoSource {
 public:
  MemoryVideo(std::vector<RgbFrame> rgb, std::vector<DepthFrame> depth);
  int frame_count() const override { return int(rgb_.size()); }
  RgbFrame rgb(int t) const override;
  DepthFrame depth(int t) const override;

 private:
  std::vector<RgbFrame> rgb_;
  std::vector<DepthFrame> depth_;
};

/// Frames are the lexicographically sorted image files of each directory.
/// RGB: png, jpg, jpeg, bmp, ppm. Depth: 16-bit single-channel png, or raw
/// little-endian u16 `.bin` with a `<file>.dims` sidecar holding "width height".
class DirectoryVideo : public VideoSource {
 public:
  int frame_count() const override { return int(rgb_files_.size()); }
  RgbFrame rgb(int t) const override;      // throws DecodeError
  DepthFrame depth(int t) const override;  // throws DecodeError

  const std::vector<std::filesystem::path>& rgb_files() const { return rgb_files_; }
  const std::vector<std::filesystem::path>& depth_files() const { return depth_files_; }

  class iterator {
   public:
    using value_type = RgbdFrame;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const DirectoryVideo* video, int t) : video_(video), t_(t) {}
    RgbdFrame operator*() const { return video_->frame(t_); }
    iterator& operator++() { ++t_; return *this; }
    void operator++(int) { ++t_; }
    bool operator==(const iterator& o) const { return t_ == o.t_; }

   private:
    const DirectoryVideo* video_ = nullptr;
    int t_ = 0;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, frame_count()}; }

 private:
  friend DirectoryVideo load_video(const std::filesystem::path&, const std::filesystem::path&);
  std::vector<std::filesystem::path> rgb_files_;
  std::vector<std::filesystem::path> depth_files_;
};

/// Lists both directories. Throws FrameCountMismatch when the counts differ
/// (two empty directories give an empty video) and IoFailure when a
/// directory is missing.
DirectoryVideo load_video(const std::filesystem::path& rgb_dir, const std::filesystem::path& depth_dir);

/// Writes frames as rgb_dir/NNNNN.png (8-bit color) and depth_dir/NNNNN.png
/// (16-bit raw depth).
void save_video(const std::filesystem::path& rgb_dir, const std::filesystem::path& depth_dir,
                std::span<const RgbFrame> rgb, std::span<const DepthFrame> depth);

}  // namespace voxflow
