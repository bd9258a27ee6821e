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

// End-to-end construction of snippet tensors for one RGB-D video:
// decode -> 2D flow -> lift -> filter -> grid fit -> augment -> voxelize ->
// assemble.

#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "voxflow/augment.hpp"
#include "voxflow/calib.hpp"
#include "voxflow/flow2d.hpp"
#include "voxflow/sampler.hpp"
#include "voxflow/store.hpp"
#include "voxflow/voxelizer.hpp"

namespace voxflow {

struct PipelineConfig {
  GridDims grid = kDefaultGridDims;
  int snippets = 10;  // K
  int length = 5;     // L
  bool pad_last = false;
  FlowParams flow;
  bool filter = true;
  double min_motion_mm = 0.5;
  double max_motion_mm = 500.0;
  double percentile = 0.99;
  bool augment = false;
  double max_rotation_deg = 30.0;
  double max_translation_frac = 0.10;
  std::uint64_t seed = 0;
  int workers = 1;

  /// Checks every module precondition up front. Throws ConfigError.
  void validate() const;
};

/// Milliseconds of wall time per stage. Stages run one after another, so
/// the parts never add up to more than the wall time of the run.
struct StageTimings {
  double decode_ms = 0.0;
  double flow_ms = 0.0;
  double lift_ms = 0.0;
  double voxelize_ms = 0.0;  // grid fit, augmentation, voxelization, assembly
  double write_ms = 0.0;
  double total() const { return decode_ms + flow_ms + lift_ms + voxelize_ms + write_ms; }
};

struct VideoResult {
  SnippetPlan plan;
  GridSpec grid;
  AugmentParams augment;
  std::vector<SnippetTensor> snippets;  // one per planned snippet, in order
  std::size_t pair_count = 0;           // distinct frame pairs pushed through flow
  std::size_t point_count = 0;          // motion points after filtering
  StageTimings timings;
};

/// Stable per-video seed: base seed mixed with a 64-bit FNV-1a hash of the
/// video identifier.
std::uint64_t video_seed(std::uint64_t base_seed, std::string_view video_id);

/// Motion cloud for the pair (t, t + 1) of an already decoded video.
MotionCloud pair_cloud(const GrayFrame& gray_t, const GrayFrame& gray_t1, const DepthFrame& depth_t,
                       const DepthFrame& depth_t1, const CameraRig& rig, const PipelineConfig& cfg,
                       int frame_index);

/// Runs the whole pipeline on one video. Output is bit-identical for any
/// worker count. When no frame pair yields motion points, the grid is fitted
/// to the first planned frame's depth points instead (or fixed bounds when
/// that frame has no valid depth either), and every tensor is zero.
/// Errors from decoding or any stage propagate with frame context.
VideoResult build_video(const VideoSource& video, const CameraRig& rig, const PipelineConfig& cfg,
                        std::uint64_t seed);

}  // namespace voxflow
