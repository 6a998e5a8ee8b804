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

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "heatloss/annotations.hpp"
#include "heatloss/counting.hpp"
#include "heatloss/loss.hpp"

namespace heatloss {

struct SynthParams {
  std::uint64_t seed = 0;
  int width = 64;
  int height = 64;
  int n_heads = 5;
  double min_side = 6.0;
  double max_side = 12.0;
  double min_center_gap = 20.0;

  void validate() const;
};

inline constexpr int kPlacementAttempts = 1000;

/// Rejection-sampled scene. Head i draws from its own stream (seed, i), so a
/// head's candidates do not depend on how many attempts earlier heads needed.
/// Centers are whole pixels so every head has an exact keypoint; sides are
/// uniform in [min_side, max_side].
SceneAnnotation generate_scene(const SynthParams& params);

/// Ground truth for a loss variant:
///   FOCAL_SCALAR, ALPHA_FOCAL      heatmap = mask = binary map
///   HEATMAP_FOCAL, POLY1_PIXELWISE heatmap = Gaussian heatmap, mask = box mask
///   MASK_FOCAL, MASK_FOCAL_POLY1   heatmap = Gaussian heatmap inside the mask, 0 outside
GroundTruthBundle make_ground_truth(const SceneAnnotation& scene, const SigmaParams& sigma,
                                    LossVariant variant, int stride = 1);

enum class FitInit {
  kUniformHalf,  // prediction 0.5 everywhere
  kZerosLogit,   // logits 0; the same starting prediction as kUniformHalf
  kSeededNoise,  // logits uniform in [-0.5, 0.5] from the fit seed
};

std::string_view fit_init_name(FitInit init) noexcept;
std::optional<FitInit> parse_fit_init(std::string_view name) noexcept;

struct FitConfig {
  LossConfig loss;
  int steps = 2000;
  double learning_rate = 0.5;
  FitInit init = FitInit::kUniformHalf;
  int record_every = 1;
  std::uint64_t seed = 0;
  int peak_window = kDefaultPeakWindow;
  double peak_threshold = kDefaultPeakThreshold;

  void validate() const;
};

struct FitTrace {
  std::vector<std::pair<int, double>> losses;  // (step, loss before that step's update)
  Grid final_pred;
  double final_loss = 0.0;  // loss of final_pred
  int final_count = 0;
  int gt_count = 0;
};

/// Full-batch gradient descent on free logits theta with prediction
/// sigmoid(theta):  theta <- theta - lr * dL/dq * q (1 - q).
/// Throws kNonFiniteLoss as soon as a loss or gradient stops being finite.
FitTrace fit_direct(const SceneAnnotation& scene, const SigmaParams& sigma, const FitConfig& cfg);

struct VariantReport {
  LossConfig variant;
  CountReport report;
};

/// Fits every scene under every variant (cfg.loss replaced by the variant,
/// everything else shared) and reports counting metrics per variant. Jobs run
/// on up to `threads` workers; results are ordered by input index.
std::vector<VariantReport> run_desk_experiment(const std::vector<SceneAnnotation>& scenes,
                                               const std::vector<LossConfig>& variants,
                                               const SigmaParams& sigma, const FitConfig& fit,
                                               int threads = 1);

}  // namespace heatloss
