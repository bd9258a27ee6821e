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

#pragma once

#include <utility>
#include <vector>

namespace voxflow {

/// K uniformly spaced snippets of L consecutive frames over a T-frame video.
struct SnippetPlan {
  int frame_count = 0;     // T
  int snippet_count = 0;   // K
  int snippet_length = 0;  // L
  std::vector<int> starts;
  std::vector<int> centers;
  bool padded = false;  // T < L: trailing frames repeat the last frame

  /// The L frame indices of snippet k, clamped to the last frame.
  std::vector<int> frames(int k) const;

  /// The L-1 (t, t+1) pairs of snippet k. Padded pairs repeat the last frame
  /// and therefore carry zero motion.
  std::vector<std::pair<int, int>> pairs(int k) const;
};

/// start_k = round_half_up(k (T-L) / (K-1)) for K >= 2; the centered snippet
/// for K = 1; all starts at 0 with padding when T < L. Throws
/// InvalidArgument when T < 1, K < 1 or L < 2.
SnippetPlan plan_snippets(int frame_count, int snippet_count, int snippet_length);

/// start_k + floor(L/2), clamped to T-1. Throws IndexOutOfRange.
int center_frame(const SnippetPlan& plan, int k);

}  // namespace voxflow
