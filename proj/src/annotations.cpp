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

#include "heatloss/annotations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace heatloss {

namespace {

std::string describe(const BoxAnnotation& b) {
  return "(cx=" + std::to_string(b.cx) + ", cy=" + std::to_string(b.cy) +
         ", w=" + std::to_string(b.w) + ", h=" + std::to_string(b.h) + ")";
}

void check_stride(int stride) {
  require(stride >= 1, ErrorCode::kInvalidArgument,
          "stride must be >= 1, got " + std::to_string(stride));
}

BoxAnnotation scaled(const BoxAnnotation& b, int stride) {
  const double s = static_cast<double>(stride);
  return {b.cx / s, b.cy / s, b.w / s, b.h / s};
}

}  // namespace

void BoxAnnotation::validate() const {
  require(std::isfinite(cx) && std::isfinite(cy), ErrorCode::kInvalidArgument,
          [&] { return "box center must be finite " + describe(*this); });
  require(std::isfinite(w) && std::isfinite(h) && w > 0.0 && h > 0.0,
          ErrorCode::kInvalidArgument, [&] { return "box sides must be finite and positive " + describe(*this); });
}

void SceneAnnotation::validate() const {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "scene dimensions must be >= 1, got " + std::to_string(width) + "x" +
              std::to_string(height));
  for (const auto& b : boxes) {
    b.validate();
    require(b.cx >= 0.0 && b.cx < width && b.cy >= 0.0 && b.cy < height,
            ErrorCode::kInvalidArgument, [&] { return "box center outside the image " + describe(b); });
  }
}

void AnchorSet::validate() const {
  require(!anchors.empty(), ErrorCode::kInvalidArgument, "anchor set is empty");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    anchors[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      require(anchors[i].cx != anchors[j].cx || anchors[i].cy != anchors[j].cy,
              ErrorCode::kInvalidArgument,
              "anchors " + std::to_string(j) + " and " + std::to_string(i) +
                  " share the same center");
    }
  }
}

void SigmaParams::validate() const {
  require(std::isfinite(eta) && eta >= 0.0, ErrorCode::kInvalidArgument,
          "eta must be finite and >= 0");
  require(std::isfinite(eps_sigma) && eps_sigma > 0.0, ErrorCode::kInvalidArgument,
          "eps_sigma must be finite and > 0");
}

double compute_sigma(const BoxAnnotation& box, const SigmaParams& params) {
  require(std::isfinite(box.w) && std::isfinite(box.h) && box.w > 0.0 && box.h > 0.0,
          ErrorCode::kInvalidArgument, [&] { return "box sides must be finite and positive " + describe(box); });
  return sigma_for_extent(2.0 * std::min(box.w, box.h) + 1.0, params);
}

double sigma_for_extent(double d, const SigmaParams& params) {
  require(std::isfinite(d) && d >= 1.0, ErrorCode::kInvalidArgument,
          [&] { return "extent D must be finite and >= 1, got " + std::to_string(d); });
  params.validate();
  return d * (1.0 + params.eta * std::exp(-d)) / params.eps_sigma;
}

std::pair<int, int> output_dims(const SceneAnnotation& scene, int stride) {
  check_stride(stride);
  return {(scene.width + stride - 1) / stride, (scene.height + stride - 1) / stride};
}

Grid render_heatmap(const SceneAnnotation& scene, const SigmaParams& params, int stride) {
  scene.validate();
  params.validate();
  const auto [gw, gh] = output_dims(scene, stride);
  Grid out(gw, gh, 0.0);
  for (const auto& box : scene.boxes) {
    const BoxAnnotation b = scaled(box, stride);
    const double sigma = compute_sigma(b, params);
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    for (int y = 0; y < gh; ++y) {
      const double dy = y - b.cy;
      for (int x = 0; x < gw; ++x) {
        const double dx = x - b.cx;
        const double k = std::exp(-(dx * dx + dy * dy) * inv_two_var);
        double& v = out(x, y);
        v = std::max(v, k);
      }
    }
  }
  return out;
}

Grid render_mask(const SceneAnnotation& scene, int stride) {
  scene.validate();
  const auto [gw, gh] = output_dims(scene, stride);
  Grid out(gw, gh, 0.0);
  for (const auto& box : scene.boxes) {
    const BoxAnnotation b = scaled(box, stride);
    const int x0 = std::max(0, static_cast<int>(std::ceil(b.cx - b.w / 2.0)));
    const int x1 = std::min(gw - 1, static_cast<int>(std::floor(b.cx + b.w / 2.0)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(b.cy - b.h / 2.0)));
    const int y1 = std::min(gh - 1, static_cast<int>(std::floor(b.cy + b.h / 2.0)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) out(x, y) = 1.0;
  }
  return out;
}

Grid render_binary_map(const SceneAnnotation& scene, int stride) {
  return render_mask(scene, stride);
}

std::vector<BoxAnnotation> interpolate_boxes(const AnchorSet& anchors,
                                             const std::vector<Point>& centers) {
  anchors.validate();
  std::vector<BoxAnnotation> out;
  out.reserve(centers.size());
  const auto& set = anchors.anchors;
  for (const auto& c : centers) {
    require(std::isfinite(c.x) && std::isfinite(c.y), ErrorCode::kInvalidArgument,
            "query center must be finite");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::size_t a = 0, b = 0;
    double da = kInf, db = kInf;
    // Strict comparisons keep the earliest anchor on ties.
    for (std::size_t i = 0; i < set.size(); ++i) {
      const double d = std::hypot(set[i].cx - c.x, set[i].cy - c.y);
      if (d < da) {
        b = a;
        db = da;
        a = i;
        da = d;
      } else if (d < db) {
        b = i;
        db = d;
      }
    }
    BoxAnnotation box{c.x, c.y, set[a].w, set[a].h};
    if (set.size() > 1 && da > 0.0) {
      const double t = da / (da + db);
      box.w = set[a].w + t * (set[b].w - set[a].w);
      box.h = set[a].h + t * (set[b].h - set[a].h);
    }
    out.push_back(box);
  }
  return out;
}

}  // namespace heatloss
