// Copyright 2026 The heatloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <utility>
#include <vector>

#include "heatloss/grid.hpp"

namespace heatloss {

/// Axis-aligned head box given by its center and size, in pixels.
struct BoxAnnotation {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;

  void validate() const;
  bool operator==(const BoxAnnotation&) const = default;
};

struct SceneAnnotation {
  int width = 1;
  int height = 1;
  std::vector<BoxAnnotation> boxes;

  /// Checks dimensions, every box and that centers lie in [0,width) x [0,height).
  void validate() const;
  int n_objects() const noexcept { return static_cast<int>(boxes.size()); }
  bool operator==(const SceneAnnotation&) const = default;
};

/// Manually preset reference boxes used to size point-only annotations.
struct AnchorSet {
  std::vector<BoxAnnotation> anchors;

  /// Non-empty, valid boxes, pairwise distinct centers.
  void validate() const;
};

struct SigmaParams {
  double eta = 1.0;        // small-object boost strength
  double eps_sigma = 3.0;  // divisor

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Gaussian spread for one box:
///   D = 2 min(w, h) + 1,  sigma = D (1 + eta e^{-D}) / eps_sigma.
/// Small boxes (small D) get their spread boosted by the e^{-D} term.
double compute_sigma(const BoxAnnotation& box, const SigmaParams& params);
/// The same formula on the extent D directly; D >= 1.
double sigma_for_extent(double d, const SigmaParams& params);

/// Output grid size for a scene at the given stride: ceil(width/stride) x ceil(height/stride).
std::pair<int, int> output_dims(const SceneAnnotation& scene, int stride);

/// Heatmap ground truth. Each box contributes
///   k(x, y) = exp(-((x - cx/s)^2 + (y - cy/s)^2) / (2 sigma^2))
/// with sigma computed on the stride-scaled box, and kernels are combined by
/// element-wise maximum so every value stays in [0, 1]. Pixel (x, y) sits at
/// integer coordinates; a box whose scaled center is integral peaks at exactly 1.
Grid render_heatmap(const SceneAnnotation& scene, const SigmaParams& params, int stride = 1);

/// 1 where the pixel lies in the closed rectangle of any box, else 0.
Grid render_mask(const SceneAnnotation& scene, int stride = 1);

/// Binary feature map ground truth: box interiors are positives. Same grid as render_mask.
Grid render_binary_map(const SceneAnnotation& scene, int stride = 1);

/// Sizes each queried center from its two nearest anchors:
/// size = size_A + t (size_B - size_A), t = d_A / (d_A + d_B), per side.
/// Falls back to the nearest anchor's size with a single anchor or d_A == 0.
/// Ties pick the anchor that comes first in the set.
std::vector<BoxAnnotation> interpolate_boxes(const AnchorSet& anchors,
                                             const std::vector<Point>& centers);

}  // namespace heatloss
