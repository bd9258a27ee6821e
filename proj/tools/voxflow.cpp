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

// voxflow: RGB-D video -> volumetric 3D motion snippets.
//
//   voxflow build  --input DIR... --calib calib.json --out OUT
//   voxflow synth  --classes N --per-class M --seed S --out DIR
//   voxflow synth  --corpus N --frames T --out DIR
//   voxflow bench  [--frames T] [--video DIR --calib FILE]
//   voxflow inspect FILE.vxf [--ply OUT.ply]
//   voxflow export-ply --video DIR --calib FILE --frame t --out OUT.ply
//
// Pipeline options (grid, snippets, flow, ...) may also come from a TOML
// file passed with --config whose keys are the long flag names; flags given
// on the command line win, and VOXFLOW_WORKERS overrides --workers.

#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "voxflow/cli.hpp"

namespace {

using voxflow::FlowBackend;
using voxflow::PipelineConfig;


void add_pipeline_options(CLI::App& app, PipelineConfig& cfg, std::vector<int>& grid,
                          std::string& backend, bool& no_filter) {
  auto* g = app.add_option("--grid", grid, "Voxel grid X,Y,Z")->delimiter(',')->expected(3);
  g->capture_default_str();
  app.add_option("--snippets", cfg.snippets, "Snippets per video (K)")->capture_default_str();
  app.add_option("--len", cfg.length, "Frames per snippet (L)")->capture_default_str();
  app.add_flag("--pad-last", cfg.pad_last, "Repeat the last pair to reach 3L channels");
  app.add_flag("--augment", cfg.augment, "Apply random translation and vertical rotation");
  app.add_option("--max-rot-deg", cfg.max_rotation_deg, "Augmentation rotation bound")->capture_default_str();
  app.add_option("--max-trans-frac", cfg.max_translation_frac, "Augmentation translation bound")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", cfg.workers, "Worker threads (VOXFLOW_WORKERS overrides)")->capture_default_str();
  app.add_option("--percentile", cfg.percentile, "Grid fit quantile")->capture_default_str();
  app.add_option("--min-motion-mm", cfg.min_motion_mm, "Drop motions shorter than this")->capture_default_str();
  app.add_option("--max-motion-mm", cfg.max_motion_mm, "Drop motions longer than this")->capture_default_str();
  app.add_flag("--no-filter", no_filter, "Keep every lifted motion vector");
  app.add_option("--flow-backend", backend, "poly (polynomial expansion) or block")
      ->check(CLI::IsMember({"poly", "block"}))
      ->capture_default_str();
  app.add_option("--flow-levels", cfg.flow.pyramid_levels, "Pyramid levels")->capture_default_str();
  app.add_option("--flow-scale", cfg.flow.pyramid_scale, "Pyramid scale")->capture_default_str();
  app.add_option("--flow-window", cfg.flow.window_size, "Averaging window")->capture_default_str();
  app.add_option("--flow-iterations", cfg.flow.iterations, "Iterations per level")->capture_default_str();
  app.add_option("--flow-poly-n", cfg.flow.poly_n, "Polynomial neighborhood")->capture_default_str();
  app.add_option("--flow-poly-sigma", cfg.flow.poly_sigma, "Polynomial Gaussian sigma")->capture_default_str();
  app.add_option("--flow-search-radius", cfg.flow.search_radius, "Block matching search radius")
      ->capture_default_str();
  app.add_option("--flow-block-half", cfg.flow.block_half, "Block matching half size")->capture_default_str();
  app.add_option("--flow-max-magnitude", cfg.flow.max_magnitude, "Flow clamp in px (0 = diagonal)")
      ->capture_default_str();
}

int workers_from_env(int fallback) {
  const char* env = std::getenv("VOXFLOW_WORKERS");
  if (env == nullptr || *env == '\0') return fallback;
  try {
    std::size_t used = 0;
    const int w = std::stoi(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return w;
  } catch (const std::exception&) {
    throw voxflow::Error(voxflow::ErrorCode::ConfigError, std::string("VOXFLOW_WORKERS is not an integer: ") + env);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxflow: RGB-D video to volumetric 3D motion representation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML file with pipeline options (keys = long flag names)");

  PipelineConfig pipeline;
  std::vector<int> grid{54, 54, 54};
  std::string backend = "poly";
  bool no_filter = false;
  add_pipeline_options(app, pipeline, grid, backend, no_filter);

  voxflow::BuildConfig build;
  std::vector<std::string> inputs;
  std::string calib, out_dir, encoding = "auto";
  auto* build_cmd = app.add_subcommand("build", "Turn RGB-D videos into VXF snippet records");
  build_cmd->add_option("--input", inputs, "Video directory or directory of videos")->required();
  build_cmd->add_option("--calib", calib, "Calibration JSON")->required();
  build_cmd->add_option("--out", out_dir, "Output directory")->required();
  build_cmd->add_option("--encoding", encoding, "auto, dense or sparse")
      ->check(CLI::IsMember({"auto", "dense", "sparse"}));

  voxflow::SynthConfig synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Render synthetic labeled records or raw videos");
  synth_cmd->add_option("--classes", synth.classes, "Motion classes (1-26) for a labeled set");
  synth_cmd->add_option("--per-class", synth.per_class, "Samples per class");
  synth_cmd->add_option("--corpus", synth.corpus, "Number of raw videos to write instead");
  synth_cmd->add_option("--frames", synth.frames, "Frames per raw video")->capture_default_str();
  synth_cmd->add_option("--sample-frames", synth.labeled.frames, "Frames per labeled sample")
      ->capture_default_str();
  synth_cmd->add_option("--width", synth.width, "Depth width of raw videos")->capture_default_str();
  synth_cmd->add_option("--height", synth.height, "Depth height of raw videos")->capture_default_str();
  synth_cmd->add_option("--depth-noise-mm", synth.depth_noise_sigma_mm, "Gaussian depth jitter sigma");
  synth_cmd->add_option("--out", synth_out, "Output directory")->required();

  voxflow::BenchConfig bench;
  std::string bench_video, bench_calib;
  auto* bench_cmd = app.add_subcommand("bench", "Measure pipeline throughput");
  bench_cmd->add_option("--frames", bench.frames, "Synthetic video length")->capture_default_str();
  bench_cmd->add_option("--rgb-width", bench.rgb_width, "Synthetic RGB width")->capture_default_str();
  bench_cmd->add_option("--rgb-height", bench.rgb_height, "Synthetic RGB height")->capture_default_str();
  bench_cmd->add_option("--video", bench_video, "Benchmark a real video directory instead");
  bench_cmd->add_option("--calib", bench_calib, "Calibration for --video");

  std::string inspect_path, inspect_ply;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print a VXF header and channel statistics");
  inspect_cmd->add_option("file", inspect_path, "VXF file")->required();
  inspect_cmd->add_option("--ply", inspect_ply, "Also write voxel centers with mean motion as PLY");

  voxflow::ExportConfig exp;
  std::string exp_video, exp_calib, exp_out;
  bool exp_binary = false;
  auto* export_cmd = app.add_subcommand("export-ply", "Write the motion cloud of one frame pair as PLY");
  export_cmd->add_option("--video", exp_video, "Video directory with rgb/ and depth/")->required();
  export_cmd->add_option("--calib", exp_calib, "Calibration JSON")->required();
  export_cmd->add_option("--frame", exp.frame, "First frame t of the pair (t, t+1)")->capture_default_str();
  export_cmd->add_option("--out", exp_out, "Output PLY")->required();
  export_cmd->add_flag("--binary", exp_binary, "Binary little-endian PLY");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : voxflow::kExitConfig;
  }

  try {
    pipeline.grid = {grid[0], grid[1], grid[2]};
    pipeline.flow.backend = backend == "block" ? FlowBackend::BlockMatching : FlowBackend::PolynomialExpansion;
    pipeline.filter = !no_filter;
    pipeline.workers = workers_from_env(pipeline.workers);
  } catch (const voxflow::Error& e) {
    std::cerr << "voxflow: " << e.what() << '\n';
    return voxflow::kExitConfig;
  }

  if (*build_cmd) {
    build.inputs.assign(inputs.begin(), inputs.end());
    build.calib = calib;
    build.out_dir = out_dir;
    build.pipeline = pipeline;
    build.encoding = encoding == "dense"    ? voxflow::VxfEncoding::Dense
                     : encoding == "sparse" ? voxflow::VxfEncoding::Sparse
                                            : voxflow::VxfEncoding::Auto;
    return voxflow::cmd_build(build, std::cout, std::cerr);
  }
  if (*synth_cmd) {
    synth.out_dir = synth_out;
    synth.seed = pipeline.seed;
    synth.labeled.grid = pipeline.grid;
    synth.labeled.workers = pipeline.workers;
    return voxflow::cmd_synth(synth, std::cout, std::cerr);
  }
  if (*bench_cmd) {
    bench.pipeline = pipeline;
    if (!bench_video.empty()) bench.video_dir = bench_video;
    bench.calib = bench_calib;
    return voxflow::cmd_bench(bench, std::cout, std::cerr);
  }
  if (*inspect_cmd) {
    std::optional<std::filesystem::path> ply;
    if (!inspect_ply.empty()) ply = inspect_ply;
    return voxflow::cmd_inspect(inspect_path, ply, std::cout, std::cerr);
  }
  exp.video_dir = exp_video;
  exp.calib = exp_calib;
  exp.out = exp_out;
  exp.format = exp_binary ? voxflow::PlyFormat::BinaryLittleEndian : voxflow::PlyFormat::Ascii;
  exp.pipeline = pipeline;
  return voxflow::cmd_export_ply(exp, std::cout, std::cerr);
}
