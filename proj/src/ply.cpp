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

#include <array>
#include <bit>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "le_io.hpp"
#include "voxflow/store.hpp"

namespace voxflow {

namespace {

constexpr std::array<const char*, 6> kProps = {"x", "y", "z", "dx", "dy", "dz"};

[[noreturn]] void bad_ply(const std::string& what) {
  throw Error(ErrorCode::DecodeError, "PLY: " + what);
}

struct Property {
  std::string name;
  int bytes = 4;  // 4 = float, 8 = double
};

}  // namespace

void export_ply(std::ostream& out, const MotionCloud& cloud, PlyFormat format) {
  if (cloud.empty()) throw Error(ErrorCode::EmptyCloud, "refusing to export an empty motion cloud");
  out << "ply\n"
      << (format == PlyFormat::Ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "comment voxflow motion cloud, frame " << cloud.frame_index << ", millimeters\n"
      << "element vertex " << cloud.size() << '\n';
  for (const char* p : kProps) out << "property float " << p << '\n';
  out << "end_header\n";

  if (format == PlyFormat::Ascii) {
    out.precision(std::numeric_limits<float>::max_digits10);
    for (const auto& p : cloud.points) {
      out << float(p.position.x) << ' ' << float(p.position.y) << ' ' << float(p.position.z) << ' '
          << float(p.motion.x) << ' ' << float(p.motion.y) << ' ' << float(p.motion.z) << '\n';
    }
  } else {
    std::vector<std::uint8_t> buf;
    buf.reserve(24);
    for (const auto& p : cloud.points) {
      buf.clear();
      for (double v : {p.position.x, p.position.y, p.position.z, p.motion.x, p.motion.y, p.motion.z}) {
        detail::put_f32(buf, float(v));
      }
      out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    }
  }
}

void export_ply_file(const std::filesystem::path& path, const MotionCloud& cloud, PlyFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  export_ply(out, cloud, format);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

MotionCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") bad_ply("missing 'ply' signature");

  bool binary = false;
  std::size_t vertex_count = 0;
  bool in_vertex = false;
  bool seen_vertex = false;
  std::vector<Property> props;
  while (true) {
    if (!std::getline(in, line)) bad_ply("header ends before end_header");
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "end_header") break;
    if (key == "comment" || key == "obj_info" || key.empty()) continue;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else bad_ply("unsupported format " + fmt);
    } else if (key == "element") {
      std::string name;
      std::size_t count = 0;
      ls >> name >> count;
      if (seen_vertex) bad_ply("only a single vertex element is supported");
      in_vertex = name == "vertex";
      if (!in_vertex) bad_ply("unsupported element " + name);
      seen_vertex = true;
      vertex_count = count;
    } else if (key == "property") {
      if (!in_vertex) bad_ply("property outside the vertex element");
      std::string type, name;
      ls >> type >> name;
      Property p{name, 4};
      if (type == "float" || type == "float32") p.bytes = 4;
      else if (type == "double" || type == "float64") p.bytes = 8;
      else bad_ply("unsupported property type " + type);
      props.push_back(p);
    } else {
      bad_ply("unexpected header line: " + line);
    }
  }

  std::array<int, 6> slot;
  slot.fill(-1);
  for (std::size_t k = 0; k < props.size(); ++k) {
    for (std::size_t s = 0; s < kProps.size(); ++s) {
      if (props[k].name == kProps[s]) slot[s] = int(k);
    }
  }
  for (int s = 0; s < 3; ++s) {
    if (slot[s] < 0) bad_ply(std::string("missing property ") + kProps[s]);
  }

  MotionCloud cloud;
  cloud.points.reserve(vertex_count);
  std::vector<double> values(props.size());
  std::vector<std::uint8_t> raw;
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (binary) {
      for (std::size_t k = 0; k < props.size(); ++k) {
        raw.resize(props[k].bytes);
        if (!in.read(reinterpret_cast<char*>(raw.data()), props[k].bytes)) {
          bad_ply("truncated vertex data at vertex " + std::to_string(v));
        }
        values[k] = props[k].bytes == 4 ? double(detail::get_f32(raw.data()))
                                        : std::bit_cast<double>(detail::get_le<std::uint64_t>(raw.data()));
      }
    } else {
      if (!std::getline(in, line)) bad_ply("truncated vertex data at vertex " + std::to_string(v));
      std::istringstream ls(line);
      for (std::size_t k = 0; k < props.size(); ++k) {
        if (!(ls >> values[k])) bad_ply("malformed vertex line " + std::to_string(v));
        if (props[k].bytes == 4) values[k] = double(float(values[k]));
      }
    }
    auto get = [&](int s) { return slot[s] < 0 ? 0.0 : values[slot[s]]; };
    cloud.points.push_back({{get(0), get(1), get(2)}, {get(3), get(4), get(5)}});
  }
  return cloud;
}

MotionCloud read_ply_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  return read_ply(in);
}

}  // namespace voxflow
