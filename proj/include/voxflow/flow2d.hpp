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
#include <vector>

#include "voxflow/frames.hpp"

namespace voxflow {

/// Luminance in [0, 1], row-major.
struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;

  GrayFrame() = default;
  GrayFrame(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(std::size_t(w) * h, fill) {}

  float at(int x, int y) const { return pixels[std::size_t(y) * width + x]; }
  float& at(int x, int y) { return pixels[std::size_t(y) * width + x]; }
};

struct Flow2 {
  float du = 0.0f;
  float dv = 0.0f;
  bool operator==(const Flow2&) const = default;
};

/// Per-pixel displacement from frame t to t+1, row-major.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<Flow2> vectors;

  FlowField() = default;
  FlowField(int w, int h) : width(w), height(h), vectors(std::size_t(w) * h) {}

  const Flow2& at(int x, int y) const { return vectors[std::size_t(y) * width + x]; }
  Flow2& at(int x, int y) { return vectors[std::size_t(y) * width + x]; }
};

enum class FlowBackend {
  PolynomialExpansion,  // pyramidal two-frame polynomial expansion
  BlockMatching,        // exhaustive SSD search, Gauss-Newton sub-pixel refinement
};

struct FlowParams {
  FlowBackend backend = FlowBackend::PolynomialExpansion;

  int pyramid_levels = 3;
  double pyramid_scale = 0.5;
  int window_size = 15;
  int iterations = 3;
  int poly_n = 5;
  double poly_sigma = 1.1;

  // Block matching: search radius in pixels, square block is (2*half+1)^2.
  int search_radius = 10;
  int block_half = 4;

  // Displacements longer than this are scaled back onto it. <= 0 means the
  // image diagonal.
  double max_magnitude = 0.0;

  /// Throws InvalidArgument when levels < 1, window is even or < 3, etc.
  void validate() const;
};

/// (0.299 R + 0.587 G + 0.114 B) / 255.
GrayFrame to_gray(const RgbFrame& rgb);

/// Dense displacement from prev to next. Deterministic for fixed inputs and
/// params. Constant-intensity input yields an all-zero field.
FlowField dense_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params = {});

/// Block-matching backend, callable directly when used as a reference.
FlowField block_match_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params);

}  // namespace voxflow
