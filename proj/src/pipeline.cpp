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

#include "voxflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "voxflow/lift3d.hpp"

namespace voxflow {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const GridSpec kFallbackBounds{{}, {-1000.0, -1000.0, 500.0}, {1000.0, 1000.0, 4500.0}};

GridSpec fallback_grid(const DepthFrame& depth, const CameraRig& rig, const PipelineConfig& cfg) {
  MotionCloud cloud;
  const Intrinsics& intr = rig.depth_intrinsics;
  for (int w = 0; w < depth.height; ++w) {
    for (int u = 0; u < depth.width; ++u) {
      const std::uint16_t raw = depth.at(u, w);
      if (!rig.valid_depth(raw)) continue;
      cloud.points.push_back({backproject(u, w, rig.depth_mm(raw), intr), {}});
    }
  }
  if (cloud.empty()) {
    GridSpec spec = kFallbackBounds;
    spec.dims = cfg.grid;
    return spec;
  }
  return fit_grid(std::span<const MotionCloud>(&cloud, 1), cfg.grid, cfg.percentile);
}

}  // namespace

void PipelineConfig::validate() const {
  for (int d : grid) {
    if (d < 1 || d > 65535) bad_config("grid dimensions must lie in [1, 65535]");
  }
  if (snippets < 1) bad_config("--snippets must be at least 1");
  if (length < 2) bad_config("--len must be at least 2");
  if (3 * (length - 1 + (pad_last ? 1 : 0)) > 65535) bad_config("--len too large for the channel field");
  if (!(min_motion_mm >= 0.0) || !(max_motion_mm > min_motion_mm)) {
    bad_config("motion filter needs 0 <= min < max");
  }
  if (!(percentile > 0.5 && percentile <= 1.0)) bad_config("percentile must lie in (0.5, 1]");
  if (!(max_rotation_deg >= 0.0) || !std::isfinite(max_rotation_deg)) {
    bad_config("--max-rot-deg must be finite and nonnegative");
  }
  if (!(max_translation_frac >= 0.0) || !std::isfinite(max_translation_frac)) {
    bad_config("--max-trans-frac must be finite and nonnegative");
  }
  if (workers < 1) bad_config("--workers must be at least 1");
  try {
    flow.validate();
  } catch (const Error& e) {
    bad_config(e.message());
  }
}

std::uint64_t video_seed(std::uint64_t base_seed, std::string_view video_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : video_id) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return base_seed ^ h;
}

MotionCloud pair_cloud(const GrayFrame& gray_t, const GrayFrame& gray_t1, const DepthFrame& depth_t,
                       const DepthFrame& depth_t1, const CameraRig& rig, const PipelineConfig& cfg,
                       int frame_index) {
  const FlowField flow = dense_flow(gray_t, gray_t1, cfg.flow);
  MotionCloud cloud = lift(flow, depth_t, depth_t1, rig, frame_index);
  if (cfg.filter) cloud = filter_cloud(cloud, cfg.min_motion_mm, cfg.max_motion_mm);
  return cloud;
}

VideoResult build_video(const VideoSource& video, const CameraRig& rig, const PipelineConfig& cfg,
                        std::uint64_t seed) {
  cfg.validate();
  rig.validate();
  VideoResult result;
  result.plan = plan_snippets(video.frame_count(), cfg.snippets, cfg.length);
  const SnippetPlan& plan = result.plan;

  // Distinct moving pairs, in frame order; padded (t, t) pairs carry no motion.
  std::vector<int> pair_starts;
  for (int k = 0; k < plan.snippet_count; ++k) {
    for (auto [a, b] : plan.pairs(k)) {
      if (a != b) pair_starts.push_back(a);
    }
  }
  std::ranges::sort(pair_starts);
  pair_starts.erase(std::unique(pair_starts.begin(), pair_starts.end()), pair_starts.end());

  std::vector<int> frames;
  for (int t : pair_starts) {
    frames.push_back(t);
    frames.push_back(t + 1);
  }
  if (frames.empty()) frames.push_back(plan.frames(0).front());
  std::ranges::sort(frames);
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

  // Decode.
  auto t0 = Clock::now();
  std::vector<GrayFrame> gray(frames.size());
  std::vector<DepthFrame> depth(frames.size());
  detail::parallel_for(frames.size(), cfg.workers, [&](std::size_t i) {
    try {
      gray[i] = to_gray(video.rgb(frames[i]));
      depth[i] = video.depth(frames[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "frame " + std::to_string(frames[i]) + ": " + e.message());
    }
  });
  result.timings.decode_ms = ms_since(t0);
  auto slot = [&](int t) {
    return std::size_t(std::ranges::lower_bound(frames, t) - frames.begin());
  };

  // Flow and lift, one task per pair; the stage's wall time is split between
  // flow and lift in proportion to the time the tasks spent in each.
  t0 = Clock::now();
  std::vector<MotionCloud> clouds(pair_starts.size());
  std::vector<double> flow_cpu(pair_starts.size()), lift_cpu(pair_starts.size());
  detail::parallel_for(pair_starts.size(), cfg.workers, [&](std::size_t i) {
    const int t = pair_starts[i];
    const std::size_t a = slot(t), b = slot(t + 1);
    try {
      auto s = Clock::now();
      const FlowField flow = dense_flow(gray[a], gray[b], cfg.flow);
      flow_cpu[i] = ms_since(s);
      s = Clock::now();
      MotionCloud cloud = lift(flow, depth[a], depth[b], rig, t);
      if (cfg.filter) cloud = filter_cloud(cloud, cfg.min_motion_mm, cfg.max_motion_mm);
      clouds[i] = std::move(cloud);
      lift_cpu[i] = ms_since(s);
    } catch (const Error& e) {
      throw Error(e.code(), "frames " + std::to_string(t) + "-" + std::to_string(t + 1) + ": " +
                                e.message());
    }
  });
  const double stage_ms = ms_since(t0);
  double flow_sum = 0.0, lift_sum = 0.0;
  for (std::size_t i = 0; i < clouds.size(); ++i) {
    flow_sum += flow_cpu[i];
    lift_sum += lift_cpu[i];
  }
  const double share = flow_sum + lift_sum > 0.0 ? flow_sum / (flow_sum + lift_sum) : 1.0;
  result.timings.flow_ms = stage_ms * share;
  result.timings.lift_ms = stage_ms - result.timings.flow_ms;
  result.pair_count = clouds.size();
  for (const auto& c : clouds) result.point_count += c.size();

  // Grid, augmentation, voxelization, assembly.
  t0 = Clock::now();
  result.grid = result.point_count > 0 ? fit_grid(clouds, cfg.grid, cfg.percentile)
                                       : fallback_grid(depth[slot(plan.frames(0).front())], rig, cfg);
  if (cfg.augment) {
    result.augment = sample_params(cfg.max_translation_frac, cfg.max_rotation_deg, seed);
  }
  std::vector<VoxelizedPair> voxelized(clouds.size());
  detail::parallel_for(clouds.size(), cfg.workers, [&](std::size_t i) {
    voxelized[i] = voxelize_pair(apply_augmentation(clouds[i], result.augment, result.grid), result.grid);
  });
  const VoxelizedPair still = voxelize_pair(MotionCloud{}, result.grid);

  result.snippets.resize(plan.snippet_count);
  detail::parallel_for(result.snippets.size(), cfg.workers, [&](std::size_t k) {
    std::vector<VoxelizedPair> parts;
    for (auto [a, b] : plan.pairs(int(k))) {
      if (a == b) {
        parts.push_back(still);
      } else {
        parts.push_back(voxelized[std::size_t(std::ranges::lower_bound(pair_starts, a) - pair_starts.begin())]);
      }
    }
    result.snippets[k] = assemble_snippet(parts, cfg.pad_last);
  });
  result.timings.voxelize_ms = ms_since(t0);
  return result;
}

}  // namespace voxflow
