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

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace voxflow {

// 8-bit interleaved RGB, row-major.
struct RgbFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  RgbFrame() = default;
  RgbFrame(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 0) {}

  std::uint8_t* at(int x, int y) { return data.data() + (std::size_t(y) * width + x) * 3; }
  const std::uint8_t* at(int x, int y) const { return data.data() + (std::size_t(y) * width + x) * 3; }
};

// Raw 16-bit sensor depth, row-major. 0 is the invalid code.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> data;

  DepthFrame() = default;
  DepthFrame(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0) {}

  std::uint16_t at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  std::uint16_t& at(int x, int y) { return data[std::size_t(y) * width + x]; }
};

}  // namespace voxflow
