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

// Little-endian byte packing shared by the binary formats.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

namespace voxflow::detail {

template <typename UInt>
inline void put_le(std::vector<std::uint8_t>& out, UInt v) {
  for (std::size_t b = 0; b < sizeof(UInt); ++b) out.push_back(std::uint8_t(v >> (8 * b)));
}

inline void put_f32(std::vector<std::uint8_t>& out, float f) {
  put_le(out, std::bit_cast<std::uint32_t>(f));
}

template <typename UInt>
inline UInt get_le(const std::uint8_t* p) {
  UInt v = 0;
  for (std::size_t b = 0; b < sizeof(UInt); ++b) v |= UInt(p[b]) << (8 * b);
  return v;
}

inline float get_f32(const std::uint8_t* p) { return std::bit_cast<float>(get_le<std::uint32_t>(p)); }

}  // namespace voxflow::detail
