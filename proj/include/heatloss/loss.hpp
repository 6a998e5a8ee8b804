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

#include <optional>
#include <string>
#include <string_view>

#include "heatloss/grid.hpp"

namespace heatloss {

enum class LossVariant {
  kFocalScalar,     // plain focal loss summed over pixels, binary labels
  kAlphaFocal,      // alpha-balanced focal loss on a binary feature map
  kHeatmapFocal,    // CenterNet-style focal loss with (1 - p)^beta negatives
  kMaskFocal,       // mask focal loss
  kPoly1Pixelwise,  // heatmap focal loss with a poly-1 perturbation
  kMaskFocalPoly1,  // mask focal loss with a poly-1 perturbation
};

std::string_view variant_name(LossVariant v) noexcept;
/// Accepts the upper-case names ("MASK_FOCAL", ...); nullopt otherwise.
std::optional<LossVariant> parse_variant(std::string_view name) noexcept;

inline constexpr double kDefaultClamp = 1e-4;

struct LossConfig {
  LossVariant variant = LossVariant::kMaskFocal;
  double alpha = 1.0;
  double beta = 4.0;
  double gamma = 2.0;
  double eps1 = 1.0;  // poly-1 perturbation coefficient
  double clamp = kDefaultClamp;

  void validate() const;
  bool operator==(const LossConfig&) const = default;
};

struct ScalarSample {
  double p = 0.5;  // predicted object probability
  int c = 1;       // class label, 0 background or 1 object
};

/// -(1 - p_t)^gamma ln(p_t), p_t = p for c = 1 and 1 - p for c = 0.
/// p is clamped to [clamp, 1 - clamp] first.
double focal_scalar(const ScalarSample& sample, double gamma, double clamp = kDefaultClamp);

struct GroundTruthBundle {
  Grid heatmap;       // p_xy
  Grid mask;          // box interiors, {0, 1}
  int n_objects = 0;  // N, the loss normaliser
};

struct LossResult {
  double value = 0.0;
  Grid grad;                  // d value / d prediction, per pixel
  bool degenerate_n = false;  // N was 0 and 1 was used instead
};

// Every evaluator clamps predictions to [clamp, 1 - clamp]; the gradient is
// zero wherever the clamp is active. Sums run sequentially in row-major order,
// so results are bit-reproducible.

/// Sum over pixels of focal_scalar with c = heatmap value. Needs a binary heatmap.
LossResult eval_focal_grid(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// -(alpha/N) sum [ (1-q)^g ln q  if p = 1 ;  q^g ln(1-q)  if p = 0 ]. Needs a binary heatmap.
LossResult eval_alpha_focal(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// -(alpha/N) sum [ (1-q)^g ln q  if p = 1 ;  (1-p)^b q^g ln(1-q)  otherwise ].
LossResult eval_heatmap_focal(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// With d = |p - q|:
///   -(alpha/N) sum [ p^b d^g ln(1-d)  if mask = 1 ;  q^g ln(1-q)  if mask = 0 ].
/// The mask has to be 1 exactly where the heatmap is positive.
LossResult eval_mask_focal(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// Poly-1 variants, chosen by cfg.variant:
///   kPoly1Pixelwise:  p = 1:  (1-q)^g ln q - e (1-q)^(g+1)
///                     p < 1:  (1-p)^b (q^g ln(1-q) - e q^(g+1))
///   kMaskFocalPoly1:  mask = 1:  d^g ln(1-d) - e p^b d^(g+1)
///                     mask = 0:  q^g ln(1-q) - e q^(g+1)
/// each scaled by -(alpha/N), e = cfg.eps1.
LossResult eval_poly1(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// Dispatches on cfg.variant after validating the config and the ground truth.
LossResult loss_with_grad(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg);

/// Throws kInvalidGroundTruth if gt cannot be used with the variant.
void validate_ground_truth(const GroundTruthBundle& gt, LossVariant variant);

}  // namespace heatloss
