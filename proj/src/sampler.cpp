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

#include "voxflow/sampler.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "voxflow/common.hpp"

namespace voxflow {

SnippetPlan plan_snippets(int frame_count, int snippet_count, int snippet_length) {
  if (frame_count < 1 || snippet_count < 1 || snippet_length < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "need T >= 1, K >= 1, L >= 2 (got T=" + std::to_string(frame_count) +
                    ", K=" + std::to_string(snippet_count) + ", L=" + std::to_string(snippet_length) + ")");
  }
  SnippetPlan plan;
  plan.frame_count = frame_count;
  plan.snippet_count = snippet_count;
  plan.snippet_length = snippet_length;
  plan.padded = frame_count < snippet_length;

  const std::int64_t span = std::max(frame_count - snippet_length, 0);
  for (int k = 0; k < snippet_count; ++k) {
    std::int64_t start = 0;
    if (snippet_count == 1) {
      start = span / 2;
    } else {
      // floor(k*span/(K-1) + 1/2) in exact integer arithmetic.
      const std::int64_t den = 2 * std::int64_t(snippet_count - 1);
      start = (2 * k * span + (snippet_count - 1)) / den;
    }
    plan.starts.push_back(int(start));
    plan.centers.push_back(std::min(int(start) + snippet_length / 2, frame_count - 1));
  }
  return plan;
}

int center_frame(const SnippetPlan& plan, int k) {
  if (k < 0 || k >= plan.snippet_count) {
    throw Error(ErrorCode::IndexOutOfRange, "snippet " + std::to_string(k) + " of " +
                                                std::to_string(plan.snippet_count));
  }
  return std::min(plan.starts[k] + plan.snippet_length / 2, plan.frame_count - 1);
}

std::vector<int> SnippetPlan::frames(int k) const {
  if (k < 0 || k >= snippet_count) {
    throw Error(ErrorCode::IndexOutOfRange, "snippet " + std::to_string(k) + " of " +
                                                std::to_string(snippet_count));
  }
  std::vector<int> out(snippet_length);
  for (int l = 0; l < snippet_length; ++l) out[l] = std::min(starts[k] + l, frame_count - 1);
  return out;
}

std::vector<std::pair<int, int>> SnippetPlan::pairs(int k) const {
  const auto f = frames(k);
  std::vector<std::pair<int, int>> out;
  for (std::size_t l = 0; l + 1 < f.size(); ++l) out.emplace_back(f[l], f[l + 1]);
  return out;
}

}  // namespace voxflow
