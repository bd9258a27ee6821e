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

#include <cstdio>
#include <fstream>
#include <random>

#include "voxflow/pipeline.hpp"
#include "voxflow/synth.hpp"

namespace voxflow {

namespace fs = std::filesystem;

std::vector<LabeledRecord> make_labeled_set(int n_classes, int samples_per_class, std::uint64_t seed,
                                            const fs::path& out_dir, const LabeledSetOptions& options) {
  if (n_classes < 1 || n_classes > kMaxMotionClasses) {
    throw Error(ErrorCode::InvalidArgument,
                "class count must lie in [1, " + std::to_string(kMaxMotionClasses) + "]");
  }
  if (samples_per_class < 1) throw Error(ErrorCode::InvalidArgument, "need at least one sample per class");
  if (options.frames < 2) throw Error(ErrorCode::InvalidArgument, "samples need at least two frames");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + out_dir.string() + ": " + ec.message());

  PipelineConfig cfg;
  cfg.grid = options.grid;
  cfg.snippets = 1;
  cfg.length = options.frames;
  cfg.workers = options.workers;
  const Intrinsics camera =
      scaled_camera(default_depth_camera(), options.camera_width, options.camera_height);

  std::vector<LabeledRecord> records;
  std::ofstream index(out_dir / "index.txt", std::ios::trunc);
  if (!index) throw Error(ErrorCode::IoFailure, "cannot write " + (out_dir / "index.txt").string());
  char name[64];
  for (int label = 0; label < n_classes; ++label) {
    for (int i = 0; i < samples_per_class; ++i) {
      std::snprintf(name, sizeof(name), "sample_%02d_%05d", label, i);
      const std::uint64_t sample_seed = video_seed(seed, name);
      std::mt19937_64 rng(sample_seed);
      auto uni = [&](double lo, double hi) { return lo + (hi - lo) * (double(rng() >> 11) * 0x1.0p-53); };
      const double speed = uni(20.0, 40.0);
      const double yaw_rate = uni(4.0, 8.0);

      SynthScene scene = subject_scene(motion_pattern(label, speed, yaw_rate), options.frames, rng());
      scene.camera = camera;
      for (auto& obj : scene.objects) obj.texture_cell_mm = 3.5 * obj.center.z / camera.fx;
      const RenderedVideo rendered = render(scene);
      const MemoryVideo video(rendered.rgb, rendered.depth);
      const VideoResult result = build_video(video, rendered.rig, cfg, sample_seed);

      const fs::path path = out_dir / (std::string(name) + ".vxf");
      VxfMeta meta;
      meta.label = std::uint32_t(label);
      write_vxf_file(path, result.snippets.front(), meta);
      index << path.filename().string() << ',' << label << '\n';
      records.push_back({path, label});
    }
  }
  index.flush();
  if (!index) throw Error(ErrorCode::IoFailure, "write failed for " + (out_dir / "index.txt").string());
  return records;
}

}  // namespace voxflow
