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

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "le_io.hpp"
#include "voxflow/store.hpp"

namespace voxflow {

namespace {

constexpr char kMagic[4] = {'V', 'X', 'F', '1'};
constexpr std::uint16_t kFlagSparse = 0x1;

bool voxel_nonzero(const SnippetTensor& t, std::size_t v) {
  for (int c = 0; c < t.channels; ++c) {
    if (std::bit_cast<std::uint32_t>(t.at(c, v)) != 0) return true;
  }
  return false;
}

void check_writable(const SnippetTensor& t) {
  t.spec.validate();
  constexpr int kMax = std::numeric_limits<std::uint16_t>::max();
  for (int d : t.spec.dims) {
    if (d > kMax) throw Error(ErrorCode::InvalidArgument, "grid dimension exceeds 65535");
  }
  if (t.channels < 1 || t.channels > kMax) {
    throw Error(ErrorCode::InvalidArgument, "channel count must lie in [1, 65535]");
  }
  if (t.values.size() != t.voxel_count() * std::size_t(t.channels)) {
    throw Error(ErrorCode::InvalidArgument, "tensor value count disagrees with dims x channels");
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  const std::uint8_t* take(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw Error(ErrorCode::CorruptPayload,
                  std::string("truncated ") + what + " at byte offset " + std::to_string(pos_) +
                      " (need " + std::to_string(n) + ", have " + std::to_string(remaining()) + ")");
    }
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

  template <typename UInt>
  UInt u(const char* what) {
    return detail::get_le<UInt>(take(sizeof(UInt), what));
  }
  float f32(const char* what) { return detail::get_f32(take(4, what)); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

[[noreturn]] void corrupt(std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::CorruptPayload, what + " at byte offset " + std::to_string(offset));
}

}  // namespace

std::size_t count_nonzero_voxels(const SnippetTensor& tensor) {
  std::size_t n = 0;
  for (std::size_t v = 0; v < tensor.voxel_count(); ++v) n += voxel_nonzero(tensor, v) ? 1 : 0;
  return n;
}

bool choose_sparse(const SnippetTensor& tensor) {
  return count_nonzero_voxels(tensor) * 10 < tensor.voxel_count();
}

void write_vxf(std::ostream& out, const SnippetTensor& tensor, const VxfMeta& meta,
               VxfEncoding encoding) {
  check_writable(tensor);
  const bool sparse = encoding == VxfEncoding::Sparse ||
                      (encoding == VxfEncoding::Auto && choose_sparse(tensor));
  const std::size_t n = tensor.voxel_count();
  const std::uint64_t count =
      sparse ? count_nonzero_voxels(tensor) : std::uint64_t(n) * std::uint64_t(tensor.channels);

  std::vector<std::uint8_t> buf;
  buf.reserve(kVxfHeaderSize);
  buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
  detail::put_le<std::uint16_t>(buf, kVxfVersion);
  detail::put_le<std::uint16_t>(buf, sparse ? kFlagSparse : 0);
  detail::put_le<std::uint32_t>(buf, meta.label);
  detail::put_le<std::uint32_t>(buf, meta.snippet_index);
  for (int d : tensor.spec.dims) detail::put_le<std::uint16_t>(buf, std::uint16_t(d));
  detail::put_le<std::uint16_t>(buf, std::uint16_t(tensor.channels));
  const Vec3& lo = tensor.spec.bounds_min;
  const Vec3& hi = tensor.spec.bounds_max;
  for (double b : {lo.x, lo.y, lo.z, hi.x, hi.y, hi.z}) detail::put_f32(buf, float(b));
  for (double a : {meta.aug_translation_frac.x, meta.aug_translation_frac.y,
                   meta.aug_translation_frac.z, meta.aug_rotation_deg}) {
    detail::put_f32(buf, float(a));
  }
  detail::put_le<std::uint64_t>(buf, count);

  auto flush = [&] {
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    buf.clear();
  };
  flush();

  constexpr std::size_t kChunk = 1 << 16;
  if (sparse) {
    for (std::size_t v = 0; v < n; ++v) {
      if (!voxel_nonzero(tensor, v)) continue;
      detail::put_le<std::uint32_t>(buf, std::uint32_t(v));
      for (int c = 0; c < tensor.channels; ++c) detail::put_f32(buf, tensor.at(c, v));
      if (buf.size() >= kChunk) flush();
    }
  } else {
    for (float f : tensor.values) {
      detail::put_f32(buf, f);
      if (buf.size() >= kChunk) flush();
    }
  }
  flush();
}

std::vector<std::uint8_t> encode_vxf(const SnippetTensor& tensor, const VxfMeta& meta,
                                     VxfEncoding encoding) {
  std::ostringstream out(std::ios::binary);
  write_vxf(out, tensor, meta, encoding);
  const std::string s = std::move(out).str();
  return {s.begin(), s.end()};
}

void write_vxf_file(const std::filesystem::path& path, const SnippetTensor& tensor,
                    const VxfMeta& meta, VxfEncoding encoding) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_vxf(out, tensor, meta, encoding);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

VxfRecord read_vxf(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < 4) corrupt(bytes.size(), "truncated magic");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), in.take(4, "magic"))) {
    throw Error(ErrorCode::BadMagic, "expected \"VXF1\" at byte offset 0");
  }
  const auto version = in.u<std::uint16_t>("version");
  if (version != kVxfVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "VXF version " + std::to_string(version));
  }
  const std::size_t flags_at = in.offset();
  const auto flags = in.u<std::uint16_t>("flags");
  if (flags & ~kFlagSparse) corrupt(flags_at, "unknown flag bits");

  VxfRecord rec;
  rec.sparse = (flags & kFlagSparse) != 0;
  rec.meta.label = in.u<std::uint32_t>("label");
  rec.meta.snippet_index = in.u<std::uint32_t>("snippet index");
  const std::size_t dims_at = in.offset();
  SnippetTensor& t = rec.tensor;
  for (int& d : t.spec.dims) {
    d = in.u<std::uint16_t>("dims");
    if (d == 0) corrupt(dims_at, "zero grid dimension");
  }
  t.channels = in.u<std::uint16_t>("channels");
  if (t.channels == 0) corrupt(dims_at + 6, "zero channel count");
  const std::size_t bounds_at = in.offset();
  float b[6];
  for (float& v : b) v = in.f32("bounds");
  t.spec.bounds_min = {b[0], b[1], b[2]};
  t.spec.bounds_max = {b[3], b[4], b[5]};
  for (int a = 0; a < 3; ++a) {
    if (!(std::isfinite(b[a]) && std::isfinite(b[a + 3]) && b[a + 3] > b[a])) {
      corrupt(bounds_at, "grid bounds must be finite with max > min");
    }
  }
  float aug[4];
  for (float& v : aug) v = in.f32("augmentation");
  rec.meta.aug_translation_frac = {aug[0], aug[1], aug[2]};
  rec.meta.aug_rotation_deg = aug[3];
  const auto count = in.u<std::uint64_t>("payload count");

  const std::size_t n = t.voxel_count();
  const std::size_t c = std::size_t(t.channels);
  const std::size_t payload_at = in.offset();
  t.values.assign(n * c, 0.0f);

  auto check_length = [&](std::uint64_t entry_bytes) {
    const std::uint64_t expect = count * entry_bytes;
    if (entry_bytes != 0 && count > std::numeric_limits<std::uint64_t>::max() / entry_bytes) {
      corrupt(payload_at, "payload count overflows");
    }
    if (in.remaining() != expect) {
      corrupt(payload_at + std::min<std::uint64_t>(expect, in.remaining()),
              "payload length mismatch: header promises " + std::to_string(expect) +
                  " bytes, file holds " + std::to_string(in.remaining()));
    }
  };

  if (rec.sparse) {
    if (count > n) corrupt(payload_at - 8, "sparse entry count exceeds voxel count");
    check_length(4 + 4 * std::uint64_t(c));
    std::int64_t last = -1;
    for (std::uint64_t e = 0; e < count; ++e) {
      const std::size_t at = in.offset();
      const auto v = in.u<std::uint32_t>("sparse index");
      if (v >= n || std::int64_t(v) <= last) corrupt(at, "sparse voxel index out of order or range");
      last = v;
      for (std::size_t ch = 0; ch < c; ++ch) {
        const std::size_t vat = in.offset();
        const float f = in.f32("sparse value");
        if (!std::isfinite(f)) corrupt(vat, "non-finite value");
        t.values[ch * n + v] = f;
      }
    }
  } else {
    if (count != std::uint64_t(n) * c) corrupt(payload_at - 8, "dense count disagrees with dims x channels");
    check_length(4);
    for (float& f : t.values) {
      const std::size_t at = in.offset();
      f = in.f32("dense value");
      if (!std::isfinite(f)) corrupt(at, "non-finite value");
    }
  }
  return rec;
}

VxfRecord read_vxf_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return read_vxf(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
}

}  // namespace voxflow
