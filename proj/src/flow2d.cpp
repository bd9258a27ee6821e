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

#include "voxflow/flow2d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/video/tracking.hpp>

#include "voxflow/common.hpp"

namespace voxflow {

void FlowParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (pyramid_levels < 1) fail("pyramid levels must be >= 1");
  if (!(pyramid_scale > 0.0 && pyramid_scale < 1.0)) fail("pyramid scale must be in (0, 1)");
  if (window_size < 3 || window_size % 2 == 0) fail("window size must be odd and >= 3");
  if (iterations < 1) fail("iterations must be >= 1");
  if (poly_n < 3 || poly_n % 2 == 0) fail("polynomial neighborhood must be odd and >= 3");
  if (!(poly_sigma > 0.0)) fail("polynomial sigma must be positive");
  if (search_radius < 0) fail("search radius must be >= 0");
  if (block_half < 1) fail("block half-size must be >= 1");
}

GrayFrame to_gray(const RgbFrame& rgb) {
  GrayFrame gray(rgb.width, rgb.height);
  const std::size_t n = std::size_t(rgb.width) * rgb.height;
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t* p = rgb.data.data() + 3 * k;
    gray.pixels[k] = float((0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0);
  }
  return gray;
}

namespace {

void check_pair(const GrayFrame& prev, const GrayFrame& next) {
  if (prev.width != next.width || prev.height != next.height) {
    throw Error(ErrorCode::DimensionMismatch,
                "frames are " + std::to_string(prev.width) + "x" + std::to_string(prev.height) +
                    " and " + std::to_string(next.width) + "x" + std::to_string(next.height));
  }
  if (prev.width <= 0 || prev.height <= 0) {
    throw Error(ErrorCode::DimensionMismatch, "frames are empty");
  }
}

bool is_constant(const GrayFrame& f) {
  const auto [lo, hi] = std::ranges::minmax(f.pixels);
  return lo == hi;
}

// Replaces non-finite vectors by zero and shrinks long ones onto the bound.
void sanitize(FlowField& flow, double max_magnitude) {
  const double bound = max_magnitude > 0.0
                           ? max_magnitude
                           : std::hypot(double(flow.width), double(flow.height));
  for (auto& v : flow.vectors) {
    if (!std::isfinite(v.du) || !std::isfinite(v.dv)) {
      v = {};
      continue;
    }
    const double mag = std::hypot(double(v.du), double(v.dv));
    if (mag > bound) {
      const double s = bound / mag;
      v.du = float(v.du * s);
      v.dv = float(v.dv * s);
    }
  }
}

FlowField polynomial_expansion_flow(const GrayFrame& prev, const GrayFrame& next,
                                    const FlowParams& params) {
  // Farneback on [0, 255] intensities.
  cv::Mat a(prev.height, prev.width, CV_32F, const_cast<float*>(prev.pixels.data()));
  cv::Mat b(next.height, next.width, CV_32F, const_cast<float*>(next.pixels.data()));
  cv::Mat a255, b255;
  a.convertTo(a255, CV_32F, 255.0);
  b.convertTo(b255, CV_32F, 255.0);

  FlowField flow(prev.width, prev.height);
  cv::Mat out(prev.height, prev.width, CV_32FC2, flow.vectors.data());
  cv::calcOpticalFlowFarneback(a255, b255, out, params.pyramid_scale, params.pyramid_levels,
                               params.window_size, params.iterations, params.poly_n,
                               params.poly_sigma, 0);
  CV_Assert(out.data == reinterpret_cast<uchar*>(flow.vectors.data()));
  return flow;
}

// Summed-area table with a zero guard row/column.
class Integral {
 public:
  Integral(int w, int h) : w_(w), h_(h), s_(std::size_t(w + 1) * (h + 1), 0.0) {}

  template <typename F>
  void build(F&& value) {
    for (int y = 0; y < h_; ++y) {
      double row = 0.0;
      for (int x = 0; x < w_; ++x) {
        row += value(x, y);
        s_[idx(x + 1, y + 1)] = s_[idx(x + 1, y)] + row;
      }
    }
  }

  // Sum over the inclusive box [x0, x1] x [y0, y1], clipped to the image.
  double box(int x0, int y0, int x1, int y1) const {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, w_ - 1);
    y1 = std::min(y1, h_ - 1);
    return s_[idx(x1 + 1, y1 + 1)] - s_[idx(x0, y1 + 1)] - s_[idx(x1 + 1, y0)] + s_[idx(x0, y0)];
  }

 private:
  std::size_t idx(int x, int y) const { return std::size_t(y) * (w_ + 1) + x; }
  int w_;
  int h_;
  std::vector<double> s_;
};

// Bilinear read with edge clamping.
double bilinear(const GrayFrame& g, double x, double y) {
  x = std::clamp(x, 0.0, double(g.width - 1));
  y = std::clamp(y, 0.0, double(g.height - 1));
  const int x0 = std::min(int(x), std::max(g.width - 2, 0));
  const int y0 = std::min(int(y), std::max(g.height - 2, 0));
  const int x1 = std::min(x0 + 1, g.width - 1);
  const int y1 = std::min(y0 + 1, g.height - 1);
  const double fx = x - x0, fy = y - y0;
  const double top = g.at(x0, y0) + fx * (g.at(x1, y0) - g.at(x0, y0));
  const double bottom = g.at(x0, y1) + fx * (g.at(x1, y1) - g.at(x0, y1));
  return top + fy * (bottom - top);
}

// Gauss-Newton refinement of an integer match over the block around (x, y):
// minimizes sum (next(p + d) - prev(p))^2 for d within one pixel of the
// integer displacement.
Flow2 refine(const GrayFrame& prev, const GrayFrame& next, int x, int y, int dx, int dy, int bh) {
  double ux = dx, uy = dy;
  for (int iter = 0; iter < 5; ++iter) {
    double hxx = 0.0, hxy = 0.0, hyy = 0.0, bx = 0.0, by = 0.0;
    for (int yy = std::max(y - bh, 0); yy <= std::min(y + bh, prev.height - 1); ++yy) {
      for (int xx = std::max(x - bh, 0); xx <= std::min(x + bh, prev.width - 1); ++xx) {
        const double px = xx + ux, py = yy + uy;
        const double r = bilinear(next, px, py) - prev.at(xx, yy);
        const double gx = 0.5 * (bilinear(next, px + 1.0, py) - bilinear(next, px - 1.0, py));
        const double gy = 0.5 * (bilinear(next, px, py + 1.0) - bilinear(next, px, py - 1.0));
        hxx += gx * gx;
        hxy += gx * gy;
        hyy += gy * gy;
        bx += gx * r;
        by += gy * r;
      }
    }
    const double det = hxx * hyy - hxy * hxy;
    if (!(det > 1e-12 * (hxx + hyy) * (hxx + hyy)) || (bx == 0.0 && by == 0.0)) break;
    const double sx = -(hyy * bx - hxy * by) / det;
    const double sy = -(hxx * by - hxy * bx) / det;
    ux = std::clamp(ux + sx, dx - 1.0, dx + 1.0);
    uy = std::clamp(uy + sy, dy - 1.0, dy + 1.0);
    if (std::abs(sx) < 1e-4 && std::abs(sy) < 1e-4) break;
  }
  return {float(ux), float(uy)};
}

}  // namespace

FlowField block_match_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params) {
  params.validate();
  check_pair(prev, next);
  const int w = prev.width;
  const int h = prev.height;
  const int r = params.search_radius;
  const int bh = params.block_half;

  FlowField flow(w, h);
  if (is_constant(prev) && is_constant(next)) return flow;

  auto sample = [&](int x, int y) {
    return next.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  };
  auto ssd_at = [&](int dx, int dy) {
    Integral table(w, h);
    table.build([&](int x, int y) {
      const double d = double(sample(x + dx, y + dy)) - prev.at(x, y);
      return d * d;
    });
    return table;
  };

  const std::size_t n = std::size_t(w) * h;
  std::vector<double> best_cost(n);
  std::vector<int> best_dx(n, 0), best_dy(n, 0);
  {
    const Integral zero = ssd_at(0, 0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) best_cost[std::size_t(y) * w + x] = zero.box(x - bh, y - bh, x + bh, y + bh);
    }
  }
  // Zero displacement wins ties, then scan order.
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const Integral table = ssd_at(dx, dy);
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const std::size_t k = std::size_t(y) * w + x;
          const double c = table.box(x - bh, y - bh, x + bh, y + bh);
          if (c < best_cost[k]) {
            best_cost[k] = c;
            best_dx[k] = dx;
            best_dy[k] = dy;
          }
        }
      }
    }
  }

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t k = std::size_t(y) * w + x;
      flow.vectors[k] = best_cost[k] == 0.0 ? Flow2{float(best_dx[k]), float(best_dy[k])}
                                            : refine(prev, next, x, y, best_dx[k], best_dy[k], bh);
    }
  }
  sanitize(flow, params.max_magnitude);
  return flow;
}

FlowField dense_flow(const GrayFrame& prev, const GrayFrame& next, const FlowParams& params) {
  params.validate();
  check_pair(prev, next);
  if (params.backend == FlowBackend::BlockMatching) return block_match_flow(prev, next, params);
  if (is_constant(prev) && is_constant(next)) return FlowField(prev.width, prev.height);
  FlowField flow = polynomial_expansion_flow(prev, next, params);
  sanitize(flow, params.max_magnitude);
  return flow;
}

}  // namespace voxflow
