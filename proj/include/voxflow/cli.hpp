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

// Subcommand implementations behind the `voxflow` tool. Each cmd_* returns
// a process exit code: 0 ok, 1 partial (some videos failed), 2 config or
// I/O error. Diagnostics go to `err`, reports to `out`.

#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "voxflow/pipeline.hpp"
#include "voxflow/store.hpp"
#include "voxflow/synth.hpp"

namespace voxflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitConfig = 2;

// ---- build ----

/// Each input is either a video directory (holding rgb/ and depth/, and
/// optionally label.txt with an integer class) or a directory whose
/// subdirectories are such videos.
struct BuildConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path calib;
  std::filesystem::path out_dir;
  PipelineConfig pipeline;
  VxfEncoding encoding = VxfEncoding::Auto;
};

struct VideoStatus {
  std::string id;
  std::filesystem::path dir;
  bool ok = false;
  std::string error;
  int label = 0;
  int frames = 0;
  std::size_t pairs = 0;
  std::size_t points = 0;
  double occupancy = 0.0;  // mean fraction of nonzero voxels over snippets
  StageTimings timings;
  std::vector<std::filesystem::path> outputs;
};

struct BuildSummary {
  std::vector<VideoStatus> videos;
  double wall_ms = 0.0;

  std::size_t failed() const;
  int exit_code() const { return failed() == 0 ? kExitOk : kExitPartial; }
  std::string to_json() const;
};

/// Sorted list of video directories under the inputs. Throws ConfigError
/// for missing inputs, duplicate video names, or when nothing is found.
std::vector<std::filesystem::path> discover_videos(const std::vector<std::filesystem::path>& inputs);

/// Writes <out>/<video>_kNN.vxf per snippet and <out>/summary.json. A video
/// that fails is reported and skipped. Throws for config and calibration
/// errors before any work starts.
BuildSummary run_build(const BuildConfig& config);
int cmd_build(const BuildConfig& config, std::ostream& out, std::ostream& err);

// ---- bench ----

struct BenchConfig {
  PipelineConfig pipeline;
  int frames = 60;
  int rgb_width = 640;  // 1920x1080 downscaled by 3
  int rgb_height = 360;
  std::uint64_t scene_seed = 1;
  std::optional<std::filesystem::path> video_dir;  // real frames instead of a synthetic video
  std::filesystem::path calib;
};

struct BenchReport {
  std::string source;
  int frames = 0;
  std::size_t pairs = 0;
  double wall_ms = 0.0;
  double pairs_per_sec = 0.0;
  StageTimings stages;

  std::string to_json() const;
};

/// Times one video through the pipeline, encoding (not storing) every VXF
/// record as the write stage. Rendering of the synthetic video is excluded.
/// Zero frames give an empty report.
BenchReport run_bench(const BenchConfig& config);
int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err);

// ---- inspect ----

struct ChannelStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct InspectReport {
  VxfRecord record;
  std::size_t nonzero_voxels = 0;
  double occupancy = 0.0;  // nonzero voxels / grid voxels
  std::vector<ChannelStats> channels;
};

InspectReport inspect_record(VxfRecord record);
void print_report(const InspectReport& report, std::ostream& out);

/// Nonzero voxels as a point cloud: voxel centers carrying the mean motion
/// over the record's frame pairs, converted back to millimeters.
MotionCloud voxel_cloud(const SnippetTensor& tensor);

int cmd_inspect(const std::filesystem::path& path, const std::optional<std::filesystem::path>& ply,
                std::ostream& out, std::ostream& err);

// ---- export-ply ----

struct ExportConfig {
  std::filesystem::path video_dir;
  std::filesystem::path calib;
  int frame = 0;  // exports motion of the pair (frame, frame + 1)
  std::filesystem::path out;
  PlyFormat format = PlyFormat::Ascii;
  PipelineConfig pipeline;  // flow parameters and motion filter
};

int cmd_export_ply(const ExportConfig& config, std::ostream& out, std::ostream& err);

// ---- synth ----

/// Labeled mode (classes > 0): make_labeled_set into out_dir. Corpus mode
/// (corpus > 0): raw RGB-D videos out_dir/video_NNN/{rgb,depth,label.txt}
/// plus out_dir/calib.json, ready for `build`.
struct SynthConfig {
  std::filesystem::path out_dir;
  std::uint64_t seed = 0;
  int classes = 0;
  int per_class = 0;
  LabeledSetOptions labeled;
  int corpus = 0;
  int frames = 30;
  int width = 512;
  int height = 424;
  double depth_noise_sigma_mm = 0.0;
};

int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err);

/// Writes the corpus described above and returns the video directories.
std::vector<std::filesystem::path> write_synthetic_corpus(const SynthConfig& config);

}  // namespace voxflow
