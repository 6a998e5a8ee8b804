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

#include "heatloss/annotations.hpp"
#include "heatloss/grid.hpp"

namespace heatloss {

inline constexpr int kDefaultPeakWindow = 3;
inline constexpr double kDefaultPeakThreshold = 0.3;
inline constexpr double kDefaultMatchRadius = 0.5;

struct Peak {
  int x = 0;
  int y = 0;
  double score = 0.0;
  bool operator==(const Peak&) const = default;
};

struct PeakSet {
  std::vector<Peak> peaks;  // row-major order
};

struct CountPair {
  int predicted = 0;
  int truth = 0;
};

struct CountReport {
  std::vector<CountPair> per_image;
  double mae = 0.0;
  double rmse = 0.0;
  int m = 0;
};

struct MatchCounts {
  int matched = 0;
  int missed = 0;
  int spurious = 0;
};

/// Max-pool peak selection. A pixel is kept if it equals the maximum of its
/// window x window neighbourhood (truncated at the borders) and is at least
/// threshold. Equal-valued kept pixels that touch (8-connectivity) form one
/// plateau, reported once at its smallest (y, x).
PeakSet extract_peaks(const Grid& heatmap, int window = kDefaultPeakWindow,
                      double threshold = kDefaultPeakThreshold);

int count_image(const Grid& heatmap, int window = kDefaultPeakWindow,
                double threshold = kDefaultPeakThreshold);

/// MAE and RMSE of per-image counts.
CountReport compute_metrics(const std::vector<CountPair>& per_image);

/// Greedy nearest-pair matching of peaks to box centers: the globally closest
/// unmatched pair is taken first, within radius_factor * min(w, h) of the box.
/// Peaks are in grid coordinates and are scaled by stride to image pixels.
MatchCounts match_localizations(const PeakSet& peaks, const SceneAnnotation& scene,
                                double radius_factor = kDefaultMatchRadius, int stride = 1);

}  // namespace heatloss
