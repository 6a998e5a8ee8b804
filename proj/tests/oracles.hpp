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

// Test-only reference implementations. Nothing here calls into the loss,
// rendering or peak code it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <tuple>
#include <vector>

#include "heatloss/grid.hpp"
#include "heatloss/loss.hpp"

namespace heatloss::oracle {

inline double clampq(double q, double c) { return std::min(std::max(q, c), 1.0 - c); }

// Literal per-pixel transcription of each loss, summed in long double.
inline double reference_loss(const Grid& pred, const Grid& heat, const Grid& mask, int n_objects,
                             const LossConfig& cfg) {
  const long double a = cfg.alpha, b = cfg.beta, g = cfg.gamma, e = cfg.eps1;
  const long double n = n_objects == 0 ? 1.0L : n_objects;
  long double sum = 0.0L;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const long double q = clampq(pred[i], cfg.clamp);
    const long double p = heat[i];
    const bool in_mask = !mask.empty() && mask[i] == 1.0;
    const long double d = std::fabs(p - q);
    long double term = 0.0L;
    switch (cfg.variant) {
      case LossVariant::kFocalScalar:
      case LossVariant::kAlphaFocal: {
        const long double pt = p == 1.0L ? q : 1.0L - q;
        term = std::pow(1.0L - pt, g) * std::log(pt);
        break;
      }
      case LossVariant::kHeatmapFocal:
        term = p == 1.0L ? std::pow(1.0L - q, g) * std::log(q)
                         : std::pow(1.0L - p, b) * std::pow(q, g) * std::log(1.0L - q);
        break;
      case LossVariant::kPoly1Pixelwise:
        term = p == 1.0L ? std::pow(1.0L - q, g) * std::log(q) - e * std::pow(1.0L - q, g + 1)
                         : std::pow(1.0L - p, b) *
                               (std::pow(q, g) * std::log(1.0L - q) - e * std::pow(q, g + 1));
        break;
      case LossVariant::kMaskFocal:
        term = in_mask ? std::pow(p, b) * std::pow(d, g) * std::log(1.0L - d)
                       : std::pow(q, g) * std::log(1.0L - q);
        break;
      case LossVariant::kMaskFocalPoly1:
        term = in_mask ? std::pow(d, g) * std::log(1.0L - d) - e * std::pow(p, b) * std::pow(d, g + 1)
                       : std::pow(q, g) * std::log(1.0L - q) - e * std::pow(q, g + 1);
        break;
    }
    sum += term;
  }
  if (cfg.variant == LossVariant::kFocalScalar) return static_cast<double>(-sum);
  return static_cast<double>(-(a / n) * sum);
}

// Central difference of f around pred[i].
inline double central_difference(const std::function<double(const Grid&)>& f, Grid pred,
                                 std::size_t i, double h) {
  const double q = pred[i];
  pred[i] = q + h;
  const double up = f(pred);
  pred[i] = q - h;
  const double down = f(pred);
  return (up - down) / (2.0 * h);
}

// Pixels strictly greater than every other pixel in their truncated window
// and at least threshold.
inline std::set<std::pair<int, int>> strict_maxima(const Grid& g, int window, double threshold) {
  std::set<std::pair<int, int>> out;
  const int r = window / 2;
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      const double v = g(x, y);
      if (v < threshold) continue;
      bool strict = true;
      for (int yy = y - r; yy <= y + r; ++yy)
        for (int xx = x - r; xx <= x + r; ++xx) {
          if (xx < 0 || yy < 0 || xx >= g.width() || yy >= g.height()) continue;
          if ((xx != x || yy != y) && g(xx, yy) >= v) strict = false;
        }
      if (strict) out.insert({x, y});
    }
  return out;
}

inline double gaussian(double x, double y, double cx, double cy, double sigma) {
  return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * sigma * sigma));
}

}  // namespace heatloss::oracle
