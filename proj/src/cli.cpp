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

#include "voxflow/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "json.hpp"

namespace voxflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

bool is_video_dir(const fs::path& p) { return fs::is_directory(p / "rgb") && fs::is_directory(p / "depth"); }

int read_label(const fs::path& dir) {
  std::ifstream in(dir / "label.txt");
  if (!in) return 0;
  long label = 0;
  if (!(in >> label) || label < 0 || label > long(std::numeric_limits<std::uint32_t>::max())) {
    throw Error(ErrorCode::DecodeError, "malformed " + (dir / "label.txt").string());
  }
  return int(label);
}

json timings_json(const StageTimings& t) {
  return {{"decode_ms", t.decode_ms}, {"flow_ms", t.flow_ms},         {"lift_ms", t.lift_ms},
          {"voxelize_ms", t.voxelize_ms}, {"write_ms", t.write_ms}};
}

double occupancy_of(const SnippetTensor& t) {
  return t.voxel_count() == 0 ? 0.0 : double(count_nonzero_voxels(t)) / double(t.voxel_count());
}

// Runs fn and maps escaping errors onto exit code 2.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "voxflow: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "voxflow: IoFailure: " << e.what() << '\n';
  }
  return kExitConfig;
}

CameraRig load_rig(const fs::path& calib) {
  if (calib.empty()) throw Error(ErrorCode::ConfigError, "no calibration file given (--calib)");
  if (!fs::exists(calib)) throw Error(ErrorCode::IoFailure, "calibration file not found: " + calib.string());
  return load_calibration(calib);
}

}  // namespace

// ---- build ----

std::size_t BuildSummary::failed() const {
  return std::size_t(std::ranges::count_if(videos, [](const VideoStatus& v) { return !v.ok; }));
}

std::string BuildSummary::to_json() const {
  json j;
  j["wall_ms"] = wall_ms;
  j["videos_total"] = videos.size();
  j["videos_failed"] = failed();
  std::size_t records = 0;
  j["videos"] = json::array();
  for (const auto& v : videos) {
    json e{{"id", v.id},     {"dir", v.dir.string()}, {"status", v.ok ? "ok" : "failed"},
           {"label", v.label}, {"frames", v.frames}, {"pairs", v.pairs},
           {"points", v.points}, {"occupancy", v.occupancy}, {"timings", timings_json(v.timings)}};
    if (!v.ok) e["error"] = v.error;
    json outs = json::array();
    for (const auto& p : v.outputs) outs.push_back(p.filename().string());
    e["outputs"] = outs;
    records += v.outputs.size();
    j["videos"].push_back(e);
  }
  j["records"] = records;
  return j.dump(2);
}

std::vector<fs::path> discover_videos(const std::vector<fs::path>& inputs) {
  if (inputs.empty()) throw Error(ErrorCode::ConfigError, "no input given (--input)");
  std::vector<fs::path> videos;
  for (const auto& in : inputs) {
    if (!fs::is_directory(in)) throw Error(ErrorCode::ConfigError, "input is not a directory: " + in.string());
    if (is_video_dir(in)) {
      videos.push_back(in);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(in)) {
      if (e.is_directory() && is_video_dir(e.path())) found.push_back(e.path());
    }
    std::ranges::sort(found);
    videos.insert(videos.end(), found.begin(), found.end());
  }
  if (videos.empty()) throw Error(ErrorCode::ConfigError, "no video directories (rgb/ + depth/) found");
  std::set<std::string> names;
  for (const auto& v : videos) {
    if (!names.insert(v.filename().string()).second) {
      throw Error(ErrorCode::ConfigError, "duplicate video name " + v.filename().string());
    }
  }
  return videos;
}

BuildSummary run_build(const BuildConfig& config) {
  const auto start = Clock::now();
  config.pipeline.validate();
  if (config.out_dir.empty()) throw Error(ErrorCode::ConfigError, "no output directory given (--out)");
  const CameraRig rig = load_rig(config.calib);
  const std::vector<fs::path> videos = discover_videos(config.inputs);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + config.out_dir.string() + ": " + ec.message());

  BuildSummary summary;
  for (const auto& dir : videos) {
    VideoStatus status;
    status.dir = dir;
    status.id = dir.filename().string();
    try {
      status.label = read_label(dir);
      const DirectoryVideo video = load_video(dir / "rgb", dir / "depth");
      status.frames = video.frame_count();
      if (status.frames == 0) throw Error(ErrorCode::EmptyInput, "video has no frames");
      VideoResult result = build_video(video, rig, config.pipeline, video_seed(config.pipeline.seed, status.id));

      const auto w0 = Clock::now();
      char suffix[32];
      for (std::size_t k = 0; k < result.snippets.size(); ++k) {
        std::snprintf(suffix, sizeof(suffix), "_k%02zu.vxf", k);
        const fs::path path = config.out_dir / (status.id + suffix);
        VxfMeta meta;
        meta.label = std::uint32_t(status.label);
        meta.snippet_index = std::uint32_t(k);
        meta.aug_translation_frac = result.augment.translation_frac;
        meta.aug_rotation_deg = result.augment.rotation_deg;
        write_vxf_file(path, result.snippets[k], meta, config.encoding);
        status.outputs.push_back(path);
        status.occupancy += occupancy_of(result.snippets[k]) / double(result.snippets.size());
      }
      result.timings.write_ms = ms_since(w0);
      status.pairs = result.pair_count;
      status.points = result.point_count;
      status.timings = result.timings;
      status.ok = true;
    } catch (const Error& e) {
      status.ok = false;
      status.error = status.id + ": " + e.what();
      for (const auto& p : status.outputs) fs::remove(p, ec);
      status.outputs.clear();
    }
    summary.videos.push_back(std::move(status));
  }
  summary.wall_ms = ms_since(start);

  std::ofstream report(config.out_dir / "summary.json", std::ios::trunc);
  report << summary.to_json() << '\n';
  if (!report) throw Error(ErrorCode::IoFailure, "cannot write " + (config.out_dir / "summary.json").string());
  return summary;
}

int cmd_build(const BuildConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const BuildSummary summary = run_build(config);
    std::size_t records = 0;
    for (const auto& v : summary.videos) {
      if (!v.ok) err << "voxflow: video failed: " << v.error << '\n';
      records += v.outputs.size();
    }
    out << "built " << records << " records from " << summary.videos.size() - summary.failed() << "/"
        << summary.videos.size() << " videos into " << config.out_dir.string() << '\n';
    return summary.exit_code();
  });
}

// ---- bench ----

std::string BenchReport::to_json() const {
  json j{{"source", source},   {"frames", frames},
         {"pairs", pairs},     {"wall_ms", wall_ms},
         {"pairs_per_sec", pairs_per_sec}, {"stages", timings_json(stages)}};
  return j.dump(2);
}

BenchReport run_bench(const BenchConfig& config) {
  config.pipeline.validate();
  BenchReport report;
  std::unique_ptr<VideoSource> video;
  CameraRig rig;
  if (config.video_dir) {
    rig = load_rig(config.calib);
    report.source = config.video_dir->string();
    video = std::make_unique<DirectoryVideo>(load_video(*config.video_dir / "rgb", *config.video_dir / "depth"));
  } else {
    if (config.frames < 0) throw Error(ErrorCode::ConfigError, "--frames must be nonnegative");
    report.source = "synthetic";
    if (config.frames == 0) return report;
    SynthScene scene = subject_scene({{25.0, 0.0, 0.0}, 5.0}, config.frames, config.scene_seed);
    scene.rgb_camera = scaled_camera(scene.camera, config.rgb_width, config.rgb_height);
    RenderedVideo rendered = render(scene);
    rig = rendered.rig;
    video = std::make_unique<MemoryVideo>(std::move(rendered.rgb), std::move(rendered.depth));
  }
  report.frames = video->frame_count();
  if (report.frames == 0) return report;

  const auto start = Clock::now();
  VideoResult result = build_video(*video, rig, config.pipeline, video_seed(config.pipeline.seed, report.source));
  const auto w0 = Clock::now();
  for (std::size_t k = 0; k < result.snippets.size(); ++k) {
    VxfMeta meta;
    meta.snippet_index = std::uint32_t(k);
    encode_vxf(result.snippets[k], meta);
  }
  result.timings.write_ms = ms_since(w0);
  report.wall_ms = ms_since(start);
  report.pairs = result.pair_count;
  report.stages = result.timings;
  report.pairs_per_sec = report.wall_ms > 0.0 ? double(report.pairs) / (report.wall_ms / 1000.0) : 0.0;
  return report;
}

int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    out << run_bench(config).to_json() << '\n';
    return kExitOk;
  });
}

// ---- inspect ----

InspectReport inspect_record(VxfRecord record) {
  InspectReport r;
  const SnippetTensor& t = record.tensor;
  const std::size_t n = t.voxel_count();
  r.nonzero_voxels = count_nonzero_voxels(t);
  r.occupancy = n == 0 ? 0.0 : double(r.nonzero_voxels) / double(n);
  for (int c = 0; c < t.channels; ++c) {
    ChannelStats s{std::numeric_limits<double>::infinity(), 0.0, -std::numeric_limits<double>::infinity()};
    double sum = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      const double x = t.at(c, v);
      s.min = std::min(s.min, x);
      s.max = std::max(s.max, x);
      sum += x;
    }
    s.mean = n == 0 ? 0.0 : sum / double(n);
    r.channels.push_back(s);
  }
  r.record = std::move(record);
  return r;
}

void print_report(const InspectReport& r, std::ostream& out) {
  const SnippetTensor& t = r.record.tensor;
  const GridSpec& g = t.spec;
  char line[256];
  out << "encoding       " << (r.record.sparse ? "sparse" : "dense") << '\n';
  out << "label          " << r.record.meta.label << '\n';
  out << "snippet_index  " << r.record.meta.snippet_index << '\n';
  out << "dims           " << g.dims[0] << " x " << g.dims[1] << " x " << g.dims[2] << '\n';
  out << "channels       " << t.channels << '\n';
  std::snprintf(line, sizeof(line), "bounds_min     %.3f %.3f %.3f mm\nbounds_max     %.3f %.3f %.3f mm\n",
                g.bounds_min.x, g.bounds_min.y, g.bounds_min.z, g.bounds_max.x, g.bounds_max.y, g.bounds_max.z);
  out << line;
  std::snprintf(line, sizeof(line), "augmentation   t=(%.4f, %.4f, %.4f) rot=%.3f deg\n",
                r.record.meta.aug_translation_frac.x, r.record.meta.aug_translation_frac.y,
                r.record.meta.aug_translation_frac.z, r.record.meta.aug_rotation_deg);
  out << line;
  std::snprintf(line, sizeof(line), "occupancy      %zu / %zu voxels (%.3f%%)\n", r.nonzero_voxels,
                t.voxel_count(), 100.0 * r.occupancy);
  out << line;
  static constexpr const char* kAxis[3] = {"dx", "dy", "dz"};
  out << "channel        min          mean         max\n";
  for (std::size_t c = 0; c < r.channels.size(); ++c) {
    const auto& s = r.channels[c];
    std::snprintf(line, sizeof(line), "%-3zu %s%-6zu %-12.6g %-12.6g %-12.6g\n", c, kAxis[c % 3], c / 3,
                  s.min, s.mean, s.max);
    out << line;
  }
}

MotionCloud voxel_cloud(const SnippetTensor& t) {
  MotionCloud cloud;
  const GridSpec& g = t.spec;
  const Vec3 s = g.scale();
  const int groups = t.channels / 3;
  if (groups == 0) return cloud;
  std::size_t v = 0;
  for (int x = 0; x < g.dims[0]; ++x) {
    for (int y = 0; y < g.dims[1]; ++y) {
      for (int z = 0; z < g.dims[2]; ++z, ++v) {
        Vec3 m;
        bool any = false;
        for (int c = 0; c < t.channels; ++c) any = any || t.at(c, v) != 0.0f;
        if (!any) continue;
        for (int p = 0; p < groups; ++p) {
          m.x += t.at(3 * p, v);
          m.y += t.at(3 * p + 1, v);
          m.z += t.at(3 * p + 2, v);
        }
        m = m * (1.0 / groups);
        cloud.points.push_back({g.voxel_center(x, y, z), {m.x * s.x, m.y * s.y, m.z * s.z}});
      }
    }
  }
  return cloud;
}

int cmd_inspect(const fs::path& path, const std::optional<fs::path>& ply, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const InspectReport report = inspect_record(read_vxf_file(path));
    out << "file           " << path.string() << '\n';
    print_report(report, out);
    if (ply) {
      const MotionCloud cloud = voxel_cloud(report.record.tensor);
      export_ply_file(*ply, cloud);
      out << "wrote " << cloud.size() << " voxel vectors to " << ply->string() << '\n';
    }
    return kExitOk;
  });
}

// ---- export-ply ----

int cmd_export_ply(const ExportConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.pipeline.validate();
    const CameraRig rig = load_rig(config.calib);
    const DirectoryVideo video = load_video(config.video_dir / "rgb", config.video_dir / "depth");
    const int t = config.frame;
    if (t < 0 || t + 1 >= video.frame_count()) {
      throw Error(ErrorCode::ConfigError, "--frame " + std::to_string(t) + " needs frames t and t+1; video has " +
                                              std::to_string(video.frame_count()));
    }
    const MotionCloud cloud = pair_cloud(to_gray(video.rgb(t)), to_gray(video.rgb(t + 1)), video.depth(t),
                                         video.depth(t + 1), rig, config.pipeline, t);
    export_ply_file(config.out, cloud, config.format);
    out << "wrote " << cloud.size() << " motion vectors to " << config.out.string() << '\n';
    return kExitOk;
  });
}

// ---- synth ----

std::vector<fs::path> write_synthetic_corpus(const SynthConfig& config) {
  if (config.corpus < 1) throw Error(ErrorCode::ConfigError, "--corpus must be at least 1");
  if (config.frames < 1) throw Error(ErrorCode::ConfigError, "--frames must be at least 1");
  const Intrinsics camera = scaled_camera(default_depth_camera(), config.width, config.height);
  std::vector<fs::path> dirs;
  CameraRig rig;
  char name[32];
  for (int i = 0; i < config.corpus; ++i) {
    std::snprintf(name, sizeof(name), "video_%03d", i);
    const int label = i % kMaxMotionClasses;
    SynthScene scene = subject_scene(motion_pattern(label, 30.0, 5.0), config.frames, video_seed(config.seed, name));
    scene.camera = camera;
    scene.depth_noise_sigma_mm = config.depth_noise_sigma_mm;
    scene.noise_seed = video_seed(config.seed + 1, name);
    for (auto& obj : scene.objects) obj.texture_cell_mm = 3.5 * obj.center.z / camera.fx;
    const RenderedVideo rendered = render(scene);
    const fs::path dir = config.out_dir / name;
    save_video(dir / "rgb", dir / "depth", rendered.rgb, rendered.depth);
    std::ofstream(dir / "label.txt") << label << '\n';
    rig = rendered.rig;
    dirs.push_back(dir);
  }
  save_calibration(config.out_dir / "calib.json", rig);
  return dirs;
}

int cmd_synth(const SynthConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (config.out_dir.empty()) throw Error(ErrorCode::ConfigError, "no output directory given (--out)");
    if (config.classes > 0) {
      const auto records = make_labeled_set(config.classes, config.per_class, config.seed, config.out_dir,
                                            config.labeled);
      out << "wrote " << records.size() << " labeled records to " << config.out_dir.string() << '\n';
    } else if (config.corpus > 0) {
      const auto dirs = write_synthetic_corpus(config);
      out << "wrote " << dirs.size() << " videos and calib.json to " << config.out_dir.string() << '\n';
    } else {
      throw Error(ErrorCode::ConfigError, "synth needs --classes/--per-class or --corpus");
    }
    return kExitOk;
  });
}

}  // namespace voxflow
