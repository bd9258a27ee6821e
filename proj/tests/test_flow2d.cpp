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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "voxflow/common.hpp"
#include "voxflow/flow2d.hpp"

using namespace voxflow;

namespace {

double median(std::vector<double> v) {
  std::ranges::sort(v);
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Components over the interior, away from borders where content enters.
std::pair<std::vector<double>, std::vector<double>> interior(const FlowField& f, int margin) {
  std::vector<double> du, dv;
  for (int y = margin; y < f.height - margin; ++y) {
    for (int x = margin; x < f.width - margin; ++x) {
      du.push_back(f.at(x, y).du);
      dv.push_back(f.at(x, y).dv);
    }
  }
  return {du, dv};
}

}  // namespace

TEST_CASE("to_gray uses Rec. 601 weights") {
  RgbFrame f(3, 1);
  f.data = {255, 255, 255, 0, 0, 0, 255, 0, 0};
  const GrayFrame g = to_gray(f);
  CHECK(g.at(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(g.at(1, 0) == 0.0f);
  CHECK(std::abs(g.at(2, 0) - 0.299) < 1e-6);
}

TEST_CASE("identical frames give zero flow") {
  const testutil::SineTexture tex(1);
  const GrayFrame a = tex.frame(96, 80);
  for (auto backend : {FlowBackend::PolynomialExpansion, FlowBackend::BlockMatching}) {
    FlowParams p;
    p.backend = backend;
    const FlowField f = dense_flow(a, a, p);
    REQUIRE(f.width == 96);
    REQUIRE(f.height == 80);
    // OpenCV's polynomial expansion is not exact within a few pixels of the
    // border; block matching is exact everywhere.
    const int margin = backend == FlowBackend::PolynomialExpansion ? 8 : 0;
    double worst = 0.0;
    for (int y = margin; y < f.height - margin; ++y) {
      for (int x = margin; x < f.width - margin; ++x) {
        worst = std::max({worst, double(std::abs(f.at(x, y).du)), double(std::abs(f.at(x, y).dv))});
      }
    }
    CHECK(worst <= 1e-3);
  }
}

TEST_CASE("constant frames give exactly zero flow") {
  const GrayFrame a(40, 30, 0.5f), b(40, 30, 0.5f);
  for (auto backend : {FlowBackend::PolynomialExpansion, FlowBackend::BlockMatching}) {
    FlowParams p;
    p.backend = backend;
    const FlowField f = dense_flow(a, b, p);
    CHECK(std::ranges::all_of(f.vectors, [](const Flow2& v) { return v == Flow2{}; }));
  }
}

TEST_CASE("a 3 px shift to the right is recovered") {
  const testutil::SineTexture tex(7);
  const GrayFrame a = tex.frame(128, 96);
  const GrayFrame b = tex.frame(128, 96, 3.0, 0.0);
  for (auto backend : {FlowBackend::PolynomialExpansion, FlowBackend::BlockMatching}) {
    CAPTURE(int(backend));
    FlowParams p;
    p.backend = backend;
    const auto [du, dv] = interior(dense_flow(a, b, p), 16);
    const double mdu = median(du), mdv = median(dv);
    CHECK(mdu >= 2.5);
    CHECK(mdu <= 3.5);
    CHECK(std::abs(mdv) <= 0.5);
  }
}

TEST_CASE("block matching finds integer shifts exactly in the interior") {
  const testutil::SineTexture tex(11);
  const GrayFrame a = tex.frame(64, 64);
  const GrayFrame b = tex.frame(64, 64, -2.0, 4.0);
  FlowParams p;
  p.search_radius = 6;
  const FlowField f = block_match_flow(a, b, p);
  int exact = 0, total = 0;
  for (int y = 16; y < 48; ++y) {
    for (int x = 16; x < 48; ++x) {
      ++total;
      const Flow2 v = f.at(x, y);
      if (std::abs(v.du + 2.0f) < 0.05f && std::abs(v.dv - 4.0f) < 0.05f) ++exact;
    }
  }
  CHECK(exact == total);
}

TEST_CASE("flow is roughly antisymmetric") {
  const testutil::SineTexture tex(5);
  const GrayFrame a = tex.frame(128, 96);
  const GrayFrame b = tex.frame(128, 96, 2.0, -1.5);
  const FlowField fwd = dense_flow(a, b);
  const FlowField bwd = dense_flow(b, a);
  std::vector<double> gap;
  for (int y = 16; y < 80; ++y) {
    for (int x = 16; x < 112; ++x) {
      gap.push_back(std::hypot(double(fwd.at(x, y).du + bwd.at(x, y).du), double(fwd.at(x, y).dv + bwd.at(x, y).dv)));
    }
  }
  CHECK(median(gap) <= 1.0);
}

TEST_CASE("flow is deterministic, finite and clamped") {
  const testutil::SineTexture tex(8);
  const GrayFrame a = tex.frame(80, 60);
  const GrayFrame b = tex.frame(80, 60, 5.0, 2.0);
  const FlowField f1 = dense_flow(a, b);
  const FlowField f2 = dense_flow(a, b);
  CHECK(f1.vectors == f2.vectors);
  const double diag = std::hypot(80.0, 60.0);
  for (const auto& v : f1.vectors) {
    REQUIRE(std::isfinite(v.du));
    REQUIRE(std::isfinite(v.dv));
    CHECK(std::hypot(double(v.du), double(v.dv)) <= diag + 1e-3);
  }
  FlowParams tight;
  tight.max_magnitude = 1.0;
  const FlowField c = dense_flow(a, b, tight);
  for (const auto& v : c.vectors) CHECK(std::hypot(double(v.du), double(v.dv)) <= 1.0 + 1e-5);
}

TEST_CASE("invalid inputs") {
  const GrayFrame a(10, 10), b(11, 10);
  try {
    dense_flow(a, b);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  FlowParams p;
  p.window_size = 4;
  CHECK_THROWS_AS(dense_flow(a, a, p), Error);
  p = {};
  p.pyramid_levels = 0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.pyramid_scale = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = {};
  p.poly_n = 4;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("block matching refines fractional shifts") {
  const testutil::SineTexture tex(21);
  const GrayFrame a = tex.frame(96, 96);
  const GrayFrame b = tex.frame(96, 96, 2.4, -1.3);
  FlowParams p;
  p.search_radius = 5;
  const auto [du, dv] = interior(block_match_flow(a, b, p), 16);
  CHECK(std::abs(median(du) - 2.4) < 0.05);
  CHECK(std::abs(median(dv) + 1.3) < 0.05);
}
