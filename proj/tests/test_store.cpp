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
#include <bit>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "voxflow/common.hpp"
#include "voxflow/store.hpp"
#include "voxflow/synth.hpp"

using namespace voxflow;

namespace {

SnippetTensor zero_tensor(GridDims dims, int channels) {
  SnippetTensor t;
  t.spec = {dims, {-100.0, -50.0, 900.0}, {100.0, 50.0, 1300.0}};
  t.channels = channels;
  t.values.assign(t.voxel_count() * std::size_t(channels), 0.0f);
  return t;
}

SnippetTensor random_tensor(std::mt19937_64& rng, double density) {
  const GridDims dims{int(1 + rng() % 9), int(1 + rng() % 9), int(1 + rng() % 9)};
  SnippetTensor t = zero_tensor(dims, int(3 * (1 + rng() % 4)));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t v = 0; v < t.voxel_count(); ++v) {
    if (u(rng) >= density) continue;
    for (int c = 0; c < t.channels; ++c) t.values[std::size_t(c) * t.voxel_count() + v] = float(u(rng) * 4.0 - 2.0);
  }
  return t;
}

// Reference little-endian decoder written against the documented layout.
template <typename T>
T le_at(const std::vector<std::uint8_t>& b, std::size_t off) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < sizeof(T); ++k) v |= std::uint64_t(b[off + k]) << (8 * k);
  if constexpr (std::is_same_v<T, float>) return std::bit_cast<float>(std::uint32_t(v));
  else return T(v);
}

ErrorCode code_of(const std::vector<std::uint8_t>& bytes) {
  try {
    read_vxf(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("VXF header layout") {
  SnippetTensor t = zero_tensor({3, 4, 5}, 6);
  t.values[7] = 1.5f;
  VxfMeta meta{9, 2, {0.05, -0.1, 0.0}, 12.5};
  const auto b = encode_vxf(t, meta, VxfEncoding::Dense);
  REQUIRE(b.size() == kVxfHeaderSize + 60u * 6u * 4u);
  CHECK(std::memcmp(b.data(), "VXF1", 4) == 0);
  CHECK(le_at<std::uint16_t>(b, 4) == 1);
  CHECK(le_at<std::uint16_t>(b, 6) == 0);
  CHECK(le_at<std::uint32_t>(b, 8) == 9u);
  CHECK(le_at<std::uint32_t>(b, 12) == 2u);
  CHECK(le_at<std::uint16_t>(b, 16) == 3);
  CHECK(le_at<std::uint16_t>(b, 18) == 4);
  CHECK(le_at<std::uint16_t>(b, 20) == 5);
  CHECK(le_at<std::uint16_t>(b, 22) == 6);
  CHECK(le_at<float>(b, 24) == -100.0f);
  CHECK(le_at<float>(b, 36) == 100.0f);
  CHECK(le_at<float>(b, 40) == 50.0f);
  CHECK(le_at<float>(b, 44) == 1300.0f);
  CHECK(le_at<float>(b, 48) == 0.05f);
  CHECK(le_at<float>(b, 60) == 12.5f);
  CHECK(le_at<std::uint64_t>(b, 64) == 360u);
  CHECK(le_at<float>(b, 72 + 7 * 4) == 1.5f);

  const auto s = encode_vxf(t, meta, VxfEncoding::Sparse);
  CHECK(le_at<std::uint16_t>(s, 6) == 1);
  CHECK(le_at<std::uint64_t>(s, 64) == 1u);
  CHECK(s.size() == kVxfHeaderSize + 4u + 6u * 4u);
  CHECK(le_at<std::uint32_t>(s, 72) == 7u);
  CHECK(le_at<float>(s, 76) == 1.5f);
}

TEST_CASE("an all-zero tensor is a sparse record with no payload") {
  const SnippetTensor t = zero_tensor({10, 10, 10}, 12);
  const auto b = encode_vxf(t, {});
  CHECK(b.size() == kVxfHeaderSize);
  const VxfRecord r = read_vxf(b);
  CHECK(r.sparse);
  CHECK(r.tensor.same_values(t));
}

TEST_CASE("a dense 54^3 x 12 record has the documented payload size") {
  SnippetTensor t = zero_tensor({54, 54, 54}, 12);
  std::ranges::fill(t.values, 0.25f);
  std::ostringstream out(std::ios::binary);
  write_vxf(out, t, {});
  CHECK(out.str().size() == kVxfHeaderSize + 54u * 54u * 54u * 12u * 4u);
  CHECK_FALSE(choose_sparse(t));
}

TEST_CASE("auto encoding switches at 10% occupancy") {
  SnippetTensor t = zero_tensor({10, 10, 10}, 3);
  for (int v = 0; v < 99; ++v) t.values[v] = 1.0f;
  CHECK(choose_sparse(t));
  t.values[99] = 1.0f;
  CHECK_FALSE(choose_sparse(t));
  // Negative zero counts as stored content (bit pattern rule).
  SnippetTensor z = zero_tensor({2, 2, 2}, 3);
  z.values[4] = -0.0f;
  CHECK(count_nonzero_voxels(z) == 1u);
  const VxfRecord back = read_vxf(encode_vxf(z, {}, VxfEncoding::Sparse));
  CHECK(std::signbit(back.tensor.values[4]));
}

TEST_CASE("VXF round trips bit-exactly in both encodings") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const SnippetTensor t = random_tensor(rng, double(trial % 10) / 9.0);
    VxfMeta meta{std::uint32_t(rng() % 60), std::uint32_t(trial), {0.01, 0.02, -0.03}, -7.0};
    for (auto enc : {VxfEncoding::Dense, VxfEncoding::Sparse, VxfEncoding::Auto}) {
      const VxfRecord r = read_vxf(encode_vxf(t, meta, enc));
      CHECK(r.tensor.same_values(t));
      CHECK(r.meta.label == meta.label);
      CHECK(r.meta.snippet_index == meta.snippet_index);
      CHECK(r.meta.aug_rotation_deg == -7.0);
      CHECK(r.meta.aug_translation_frac.x == double(0.01f));
    }
  }
}

TEST_CASE("VXF decoding errors") {
  SnippetTensor t = zero_tensor({4, 4, 4}, 3);
  t.values[5] = 2.0f;
  const auto dense = encode_vxf(t, {}, VxfEncoding::Dense);
  const auto sparse = encode_vxf(t, {}, VxfEncoding::Sparse);

  auto bad = dense;
  bad[0] = 'X';
  CHECK(code_of(bad) == ErrorCode::BadMagic);
  bad = dense;
  bad[4] = 2;
  CHECK(code_of(bad) == ErrorCode::UnsupportedVersion);
  CHECK(code_of({dense.begin(), dense.begin() + 2}) == ErrorCode::CorruptPayload);
  CHECK(code_of({dense.begin(), dense.begin() + 40}) == ErrorCode::CorruptPayload);
  CHECK(code_of({dense.begin(), dense.end() - 1}) == ErrorCode::CorruptPayload);
  bad = dense;
  bad.push_back(0);
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);
  bad = sparse;
  bad[64] = 2;  // promises two entries, holds one
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);
  bad = dense;
  bad[6] = 4;  // unknown flag
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);
  bad = dense;
  bad[16] = bad[17] = 0;  // zero dimension
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);
  bad = sparse;
  bad[72] = 200;  // index past the grid
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);
  bad = dense;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad.data() + 72, &nan, 4);
  CHECK(code_of(bad) == ErrorCode::CorruptPayload);

  try {
    read_vxf({dense.begin(), dense.end() - 4});
  } catch (const Error& e) {
    CHECK(e.message().find("byte offset") != std::string::npos);
  }
}

TEST_CASE("VXF files") {
  const auto dir = testutil::scratch("store_vxf");
  SnippetTensor t = zero_tensor({5, 5, 5}, 3);
  t.values[3] = -1.0f;
  write_vxf_file(dir / "a.vxf", t, {4, 1, {}, 0.0});
  const VxfRecord r = read_vxf_file(dir / "a.vxf");
  CHECK(r.tensor.same_values(t));
  CHECK(r.meta.label == 4u);
  CHECK_THROWS_AS(read_vxf_file(dir / "missing.vxf"), Error);
  CHECK_THROWS_AS(write_vxf_file(dir / "no" / "such" / "dir.vxf", t, {}), Error);
  std::ofstream(dir / "bad.vxf") << "VXF1";
  try {
    read_vxf_file(dir / "bad.vxf");
    FAIL("expected CorruptPayload");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CorruptPayload);
    CHECK(e.message().find("bad.vxf") != std::string::npos);
  }
}

TEST_CASE("PLY export and re-import") {
  MotionCloud c;
  c.points.push_back({{1.5, -2.25, 1000.125}, {3.0, 0.5, -7.75}});
  SUBCASE("single vertex header") {
    std::ostringstream out;
    export_ply(out, c);
    CHECK(out.str().find("element vertex 1\n") != std::string::npos);
    CHECK(out.str().find("property float dz\n") != std::string::npos);
  }
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-3000.0, 3000.0);
  for (int k = 0; k < 500; ++k) c.points.push_back({{d(rng), d(rng), d(rng)}, {d(rng), d(rng), d(rng)}});
  for (auto fmt : {PlyFormat::Ascii, PlyFormat::BinaryLittleEndian}) {
    std::stringstream io(std::ios::in | std::ios::out | std::ios::binary);
    export_ply(io, c, fmt);
    const MotionCloud back = read_ply(io);
    REQUIRE(back.size() == c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      CHECK(back.points[k].position.x == double(float(c.points[k].position.x)));
      CHECK(back.points[k].position.z == double(float(c.points[k].position.z)));
      CHECK(back.points[k].motion.y == double(float(c.points[k].motion.y)));
    }
  }
  std::ostringstream sink;
  try {
    export_ply(sink, MotionCloud{});
    FAIL("expected EmptyCloud");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCloud);
  }
  std::istringstream junk("not a ply\n");
  CHECK_THROWS_AS(read_ply(junk), Error);
}

TEST_CASE("frame directories") {
  const auto dir = testutil::scratch("store_video");
  SUBCASE("empty directories make an empty video") {
    std::filesystem::create_directories(dir / "rgb");
    std::filesystem::create_directories(dir / "depth");
    const DirectoryVideo v = load_video(dir / "rgb", dir / "depth");
    CHECK(v.frame_count() == 0);
    CHECK(v.begin() == v.end());
  }
  SUBCASE("missing directory") {
    CHECK_THROWS_AS(load_video(dir / "nope", dir / "nope2"), Error);
  }
  SUBCASE("rendered frames come back in order") {
    const RenderedVideo r = render(translating_plane_scene({20.0, 0.0, 0.0}, 1200.0, 4, 3));
    save_video(dir / "rgb", dir / "depth", r.rgb, r.depth);
    const DirectoryVideo v = load_video(dir / "rgb", dir / "depth");
    REQUIRE(v.frame_count() == 4);
    int t = 0;
    for (const RgbdFrame f : v) {
      CHECK(f.rgb.data == r.rgb[t].data);
      CHECK(f.depth.data == r.depth[t].data);
      ++t;
    }
    CHECK(t == 4);
    std::filesystem::remove(v.depth_files().back());
    try {
      load_video(dir / "rgb", dir / "depth");
      FAIL("expected FrameCountMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::FrameCountMismatch);
    }
  }
  SUBCASE("raw depth with a sidecar") {
    const RenderedVideo r = render(translating_plane_scene({}, 1200.0, 1, 3));
    save_video(dir / "rgb", dir / "png_depth", r.rgb, r.depth);
    std::filesystem::create_directories(dir / "depth");
    {
      std::ofstream raw(dir / "depth" / "00000.bin", std::ios::binary);
      for (std::uint16_t d : r.depth[0].data) {
        const char b[2] = {char(d & 0xFF), char(d >> 8)};
        raw.write(b, 2);
      }
      std::ofstream(dir / "depth" / "00000.bin.dims") << "512 424\n";
    }
    const DirectoryVideo v = load_video(dir / "rgb", dir / "depth");
    CHECK(v.depth(0).data == r.depth[0].data);
    std::ofstream(dir / "depth" / "00000.bin.dims") << "512 423\n";
    try {
      v.depth(0);
      FAIL("expected DecodeError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DecodeError);
    }
  }
  SUBCASE("undecodable images") {
    std::filesystem::create_directories(dir / "rgb");
    std::filesystem::create_directories(dir / "depth");
    std::ofstream(dir / "rgb" / "0.png") << "garbage";
    std::ofstream(dir / "depth" / "0.png") << "garbage";
    const DirectoryVideo v = load_video(dir / "rgb", dir / "depth");
    CHECK_THROWS_AS(v.rgb(0), Error);
    CHECK_THROWS_AS(v.depth(0), Error);
  }
}

TEST_CASE("memory videos") {
  CHECK_THROWS_AS(MemoryVideo({RgbFrame(2, 2)}, {}), Error);
  const MemoryVideo v({RgbFrame(2, 2)}, {DepthFrame(2, 2)});
  CHECK(v.frame_count() == 1);
  CHECK_THROWS_AS(v.rgb(1), Error);
}
