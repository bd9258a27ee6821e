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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "le_io.hpp"
#include "voxflow/store.hpp"

namespace voxflow {

namespace fs = std::filesystem;

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::ranges::transform(e, e.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return e;
}

std::vector<fs::path> list_frames(const fs::path& dir, std::initializer_list<std::string_view> exts) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoFailure, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string e = lower_ext(entry.path());
    if (std::ranges::find(exts, e) != exts.end()) out.push_back(entry.path());
  }
  std::ranges::sort(out, [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  return out;
}

DepthFrame read_raw_depth(const fs::path& path) {
  fs::path sidecar = path;
  sidecar += ".dims";
  std::ifstream dims(sidecar);
  int w = 0, h = 0;
  if (!(dims >> w >> h) || w <= 0 || h <= 0) {
    throw Error(ErrorCode::DecodeError, "missing or malformed sidecar " + sidecar.string());
  }
  std::ifstream in(path, std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != std::size_t(w) * h * 2) {
    throw Error(ErrorCode::DecodeError, path.string() + " holds " + std::to_string(bytes.size()) +
                                            " bytes, expected " + std::to_string(std::size_t(w) * h * 2));
  }
  DepthFrame d(w, h);
  for (std::size_t k = 0; k < d.data.size(); ++k) d.data[k] = detail::get_le<std::uint16_t>(bytes.data() + 2 * k);
  return d;
}

}  // namespace

MemoryVideo::MemoryVideo(std::vector<RgbFrame> rgb, std::vector<DepthFrame> depth)
    : rgb_(std::move(rgb)), depth_(std::move(depth)) {
  if (rgb_.size() != depth_.size()) {
    throw Error(ErrorCode::FrameCountMismatch, std::to_string(rgb_.size()) + " RGB vs " +
                                                   std::to_string(depth_.size()) + " depth frames");
  }
}

RgbFrame MemoryVideo::rgb(int t) const {
  if (t < 0 || t >= frame_count()) throw Error(ErrorCode::IndexOutOfRange, "frame " + std::to_string(t));
  return rgb_[t];
}

DepthFrame MemoryVideo::depth(int t) const {
  if (t < 0 || t >= frame_count()) throw Error(ErrorCode::IndexOutOfRange, "frame " + std::to_string(t));
  return depth_[t];
}

RgbFrame DirectoryVideo::rgb(int t) const {
  if (t < 0 || t >= frame_count()) throw Error(ErrorCode::IndexOutOfRange, "frame " + std::to_string(t));
  const fs::path& path = rgb_files_[t];
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
  RgbFrame f(bgr.cols, bgr.rows);
  cv::Mat rgb(bgr.rows, bgr.cols, CV_8UC3, f.data.data());
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  return f;
}

DepthFrame DirectoryVideo::depth(int t) const {
  if (t < 0 || t >= frame_count()) throw Error(ErrorCode::IndexOutOfRange, "frame " + std::to_string(t));
  const fs::path& path = depth_files_[t];
  if (lower_ext(path) == ".bin") return read_raw_depth(path);
  cv::Mat img = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (img.empty()) throw Error(ErrorCode::DecodeError, "cannot decode " + path.string());
  if (img.type() != CV_16UC1) {
    throw Error(ErrorCode::DecodeError, path.string() + " is not a 16-bit single-channel image");
  }
  DepthFrame d(img.cols, img.rows);
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<std::uint16_t>(y);
    std::copy(row, row + img.cols, d.data.begin() + std::ptrdiff_t(y) * img.cols);
  }
  return d;
}

DirectoryVideo load_video(const fs::path& rgb_dir, const fs::path& depth_dir) {
  DirectoryVideo v;
  v.rgb_files_ = list_frames(rgb_dir, {".png", ".jpg", ".jpeg", ".bmp", ".ppm"});
  v.depth_files_ = list_frames(depth_dir, {".png", ".bin"});
  if (v.rgb_files_.size() != v.depth_files_.size()) {
    throw Error(ErrorCode::FrameCountMismatch,
                std::to_string(v.rgb_files_.size()) + " RGB frames in " + rgb_dir.string() + " vs " +
                    std::to_string(v.depth_files_.size()) + " depth frames in " + depth_dir.string());
  }
  return v;
}

void save_video(const fs::path& rgb_dir, const fs::path& depth_dir, std::span<const RgbFrame> rgb,
                std::span<const DepthFrame> depth) {
  if (rgb.size() != depth.size()) {
    throw Error(ErrorCode::FrameCountMismatch, "cannot save unequal RGB and depth sequences");
  }
  fs::create_directories(rgb_dir);
  fs::create_directories(depth_dir);
  char name[32];
  for (std::size_t t = 0; t < rgb.size(); ++t) {
    std::snprintf(name, sizeof(name), "%05zu.png", t);
    const RgbFrame& f = rgb[t];
    cv::Mat src(f.height, f.width, CV_8UC3, const_cast<std::uint8_t*>(f.data.data()));
    cv::Mat bgr;
    cv::cvtColor(src, bgr, cv::COLOR_RGB2BGR);
    if (!cv::imwrite((rgb_dir / name).string(), bgr)) {
      throw Error(ErrorCode::IoFailure, "cannot write " + (rgb_dir / name).string());
    }
    const DepthFrame& d = depth[t];
    cv::Mat dm(d.height, d.width, CV_16UC1, const_cast<std::uint16_t*>(d.data.data()));
    if (!cv::imwrite((depth_dir / name).string(), dm)) {
      throw Error(ErrorCode::IoFailure, "cannot write " + (depth_dir / name).string());
    }
  }
}

}  // namespace voxflow
