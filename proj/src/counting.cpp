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

#include "heatloss/counting.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

namespace heatloss {

namespace {

void check_peak_params(int window, double threshold) {
  require(window >= 3 && window % 2 == 1, ErrorCode::kInvalidArgument,
          "peak window must be odd and >= 3, got " + std::to_string(window));
  require(threshold > 0.0 && threshold < 1.0, ErrorCode::kInvalidArgument,
          "peak threshold must lie in (0, 1)");
}

}  // namespace

PeakSet extract_peaks(const Grid& heatmap, int window, double threshold) {
  check_peak_params(window, threshold);
  const int w = heatmap.width();
  const int h = heatmap.height();
  const int r = window / 2;
  for (double v : heatmap.values())
    require(std::isfinite(v), ErrorCode::kInvalidArgument, "heatmap contains non-finite values");

  std::vector<char> candidate(heatmap.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = heatmap(x, y);
      if (v < threshold) continue;
      bool is_max = true;
      for (int yy = std::max(0, y - r); is_max && yy <= std::min(h - 1, y + r); ++yy)
        for (int xx = std::max(0, x - r); xx <= std::min(w - 1, x + r); ++xx)
          if (heatmap(xx, yy) > v) {
            is_max = false;
            break;
          }
      candidate[static_cast<std::size_t>(y) * w + x] = is_max;
    }
  }

  // Row-major flood fill: the first pixel reached in each plateau is its
  // lexicographically smallest (y, x).
  PeakSet out;
  std::vector<char> visited(heatmap.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!candidate[i] || visited[i]) continue;
      const double v = heatmap(x, y);
      out.peaks.push_back({x, y, v});
      visited[i] = 1;
      stack.assign(1, {x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t j = static_cast<std::size_t>(ny) * w + nx;
            if (visited[j] || !candidate[j] || heatmap(nx, ny) != v) continue;
            visited[j] = 1;
            stack.push_back({nx, ny});
          }
      }
    }
  }
  return out;
}

int count_image(const Grid& heatmap, int window, double threshold) {
  return static_cast<int>(extract_peaks(heatmap, window, threshold).peaks.size());
}

CountReport compute_metrics(const std::vector<CountPair>& per_image) {
  require(!per_image.empty(), ErrorCode::kInvalidArgument,
          "count metrics need at least one image");
  CountReport report;
  report.per_image = per_image;
  report.m = static_cast<int>(per_image.size());
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (const auto& c : per_image) {
    require(c.predicted >= 0 && c.truth >= 0, ErrorCode::kInvalidArgument,
            "counts must be non-negative");
    const double e = std::abs(static_cast<double>(c.predicted) - static_cast<double>(c.truth));
    abs_sum += e;
    sq_sum += e * e;
  }
  report.mae = abs_sum / report.m;
  report.rmse = std::sqrt(sq_sum / report.m);
  return report;
}

MatchCounts match_localizations(const PeakSet& peaks, const SceneAnnotation& scene,
                                double radius_factor, int stride) {
  require(radius_factor > 0.0 && std::isfinite(radius_factor), ErrorCode::kInvalidArgument,
          "radius_factor must be > 0");
  require(stride >= 1, ErrorCode::kInvalidArgument, "stride must be >= 1");

  struct Candidate {
    double dist;
    std::size_t peak;
    std::size_t box;
  };
  std::vector<Candidate> pairs;
  for (std::size_t p = 0; p < peaks.peaks.size(); ++p) {
    const double px = static_cast<double>(peaks.peaks[p].x) * stride;
    const double py = static_cast<double>(peaks.peaks[p].y) * stride;
    for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
      const auto& box = scene.boxes[b];
      const double d = std::hypot(px - box.cx, py - box.cy);
      if (d <= radius_factor * std::min(box.w, box.h)) pairs.push_back({d, p, b});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.dist, a.peak, a.box) < std::tie(b.dist, b.peak, b.box);
  });

  std::vector<char> peak_used(peaks.peaks.size(), 0);
  std::vector<char> box_used(scene.boxes.size(), 0);
  MatchCounts out;
  for (const auto& c : pairs) {
    if (peak_used[c.peak] || box_used[c.box]) continue;
    peak_used[c.peak] = box_used[c.box] = 1;
    ++out.matched;
  }
  out.missed = static_cast<int>(scene.boxes.size()) - out.matched;
  out.spurious = static_cast<int>(peaks.peaks.size()) - out.matched;
  return out;
}

}  // namespace heatloss
