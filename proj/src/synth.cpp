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

#include "heatloss/synth.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "heatloss/rng.hpp"

namespace heatloss {

namespace {

constexpr std::array<std::pair<FitInit, std::string_view>, 3> kInitNames{{
    {FitInit::kUniformHalf, "UNIFORM_HALF"},
    {FitInit::kZerosLogit, "ZEROS_LOGIT"},
    {FitInit::kSeededNoise, "SEEDED_NOISE"},
}};

// Stream ids above every head index, for the fitter's noise initialisation.
constexpr std::uint64_t kInitStream = 0xf17ULL << 48;

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void SynthParams::validate() const {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument,
          "synthetic scene dimensions must be >= 1");
  require(n_heads >= 0, ErrorCode::kInvalidArgument, "n_heads must be >= 0");
  require(std::isfinite(min_side) && std::isfinite(max_side) && min_side > 0.0 &&
              min_side <= max_side,
          ErrorCode::kInvalidArgument, "size range needs 0 < min_side <= max_side");
  require(std::isfinite(min_center_gap) && min_center_gap >= 0.0, ErrorCode::kInvalidArgument,
          "min_center_gap must be >= 0");
}

SceneAnnotation generate_scene(const SynthParams& params) {
  params.validate();
  SceneAnnotation scene{params.width, params.height, {}};
  scene.boxes.reserve(static_cast<std::size_t>(params.n_heads));
  for (int i = 0; i < params.n_heads; ++i) {
    RandomStream rng(params.seed, static_cast<std::uint64_t>(i));
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      BoxAnnotation b;
      b.cx = rng.below(params.width);
      b.cy = rng.below(params.height);
      b.w = rng.uniform(params.min_side, params.max_side);
      b.h = rng.uniform(params.min_side, params.max_side);
      placed = std::all_of(scene.boxes.begin(), scene.boxes.end(), [&](const BoxAnnotation& o) {
        return std::hypot(o.cx - b.cx, o.cy - b.cy) >= params.min_center_gap;
      });
      if (placed) scene.boxes.push_back(b);
    }
    if (!placed)
      fail(ErrorCode::kInfeasibleSynth,
           "could not place head " + std::to_string(i) + " of " + std::to_string(params.n_heads) +
               " with min_center_gap " + std::to_string(params.min_center_gap) + " in a " +
               std::to_string(params.width) + "x" + std::to_string(params.height) +
               " scene after " + std::to_string(kPlacementAttempts) + " attempts");
  }
  return scene;
}

GroundTruthBundle make_ground_truth(const SceneAnnotation& scene, const SigmaParams& sigma,
                                    LossVariant variant, int stride) {
  GroundTruthBundle gt;
  gt.n_objects = scene.n_objects();
  switch (variant) {
    case LossVariant::kFocalScalar:
    case LossVariant::kAlphaFocal:
      gt.heatmap = render_binary_map(scene, stride);
      gt.mask = gt.heatmap;
      break;
    case LossVariant::kHeatmapFocal:
    case LossVariant::kPoly1Pixelwise:
      gt.heatmap = render_heatmap(scene, sigma, stride);
      gt.mask = render_mask(scene, stride);
      break;
    case LossVariant::kMaskFocal:
    case LossVariant::kMaskFocalPoly1:
      gt.heatmap = render_heatmap(scene, sigma, stride);
      gt.mask = render_mask(scene, stride);
      for (std::size_t i = 0; i < gt.heatmap.size(); ++i) {
        // Far corners of very elongated boxes can underflow; keep them positive.
        gt.heatmap[i] = gt.mask[i] == 1.0
                            ? std::max(gt.heatmap[i], std::numeric_limits<double>::min())
                            : 0.0;
      }
      break;
  }
  return gt;
}

std::string_view fit_init_name(FitInit init) noexcept {
  for (const auto& [v, name] : kInitNames)
    if (v == init) return name;
  return "UNKNOWN";
}

std::optional<FitInit> parse_fit_init(std::string_view name) noexcept {
  for (const auto& [v, n] : kInitNames)
    if (n == name) return v;
  return std::nullopt;
}

void FitConfig::validate() const {
  loss.validate();
  require(steps >= 1, ErrorCode::kInvalidArgument, "steps must be >= 1");
  require(std::isfinite(learning_rate) && learning_rate > 0.0, ErrorCode::kInvalidArgument,
          "learning_rate must be > 0");
  require(record_every >= 1, ErrorCode::kInvalidArgument, "record_every must be >= 1");
  require(peak_window >= 3 && peak_window % 2 == 1, ErrorCode::kInvalidArgument,
          "peak window must be odd and >= 3");
  require(peak_threshold > 0.0 && peak_threshold < 1.0, ErrorCode::kInvalidArgument,
          "peak threshold must lie in (0, 1)");
}

FitTrace fit_direct(const SceneAnnotation& scene, const SigmaParams& sigma, const FitConfig& cfg) {
  cfg.validate();
  scene.validate();
  const GroundTruthBundle gt = make_ground_truth(scene, sigma, cfg.loss.variant);
  const int w = gt.heatmap.width();
  const int h = gt.heatmap.height();

  Grid theta(w, h, 0.0);
  if (cfg.init == FitInit::kSeededNoise) {
    RandomStream rng(cfg.seed, kInitStream);
    for (double& t : theta.values()) t = rng.uniform(-0.5, 0.5);
  }

  Grid pred(w, h, 0.5);
  auto update_pred = [&] {
    for (std::size_t i = 0; i < theta.size(); ++i) pred[i] = sigmoid(theta[i]);
  };

  FitTrace trace;
  trace.gt_count = gt.n_objects;
  trace.losses.reserve(static_cast<std::size_t>((cfg.steps + cfg.record_every - 1) / cfg.record_every));
  for (int step = 0; step < cfg.steps; ++step) {
    update_pred();
    const LossResult r = loss_with_grad(pred, gt, cfg.loss);
    bool finite = std::isfinite(r.value);
    for (std::size_t i = 0; finite && i < r.grad.size(); ++i) finite = std::isfinite(r.grad[i]);
    if (!finite)
      fail(ErrorCode::kNonFiniteLoss, "loss became non-finite at step " + std::to_string(step) +
                                          "; learning rate " + std::to_string(cfg.learning_rate) +
                                          " is probably too large");
    if (step % cfg.record_every == 0) trace.losses.emplace_back(step, r.value);
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double q = pred[i];
      theta[i] -= cfg.learning_rate * r.grad[i] * q * (1.0 - q);
      if (!std::isfinite(theta[i]))
        fail(ErrorCode::kNonFiniteLoss, "logits diverged at step " + std::to_string(step) +
                                            "; learning rate " + std::to_string(cfg.learning_rate) +
                                            " is probably too large");
    }
  }
  update_pred();
  const LossResult final_eval = loss_with_grad(pred, gt, cfg.loss);
  require(std::isfinite(final_eval.value), ErrorCode::kNonFiniteLoss,
          "final loss is non-finite");
  trace.final_loss = final_eval.value;
  trace.final_count = count_image(pred, cfg.peak_window, cfg.peak_threshold);
  trace.final_pred = std::move(pred);
  return trace;
}

std::vector<VariantReport> run_desk_experiment(const std::vector<SceneAnnotation>& scenes,
                                               const std::vector<LossConfig>& variants,
                                               const SigmaParams& sigma, const FitConfig& fit,
                                               int threads) {
  require(!scenes.empty(), ErrorCode::kInvalidArgument, "experiment needs at least one scene");
  require(!variants.empty(), ErrorCode::kInvalidArgument,
          "experiment needs at least one loss variant");
  for (const auto& v : variants) {
    FitConfig c = fit;
    c.loss = v;
    c.validate();
  }

  const std::size_t n_jobs = scenes.size() * variants.size();
  std::vector<CountPair> counts(n_jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::size_t first_error_job = n_jobs;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      const std::size_t vi = job / scenes.size();
      const std::size_t si = job % scenes.size();
      try {
        FitConfig c = fit;
        c.loss = variants[vi];
        const FitTrace t = fit_direct(scenes[si], sigma, c);
        counts[job] = {t.final_count, t.gt_count};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        // Report the lowest failing job so the error does not depend on scheduling.
        if (job < first_error_job) {
          first_error_job = job;
          first_error = std::current_exception();
        }
      }
    }
  };

  const int n_threads =
      std::clamp(threads, 1, static_cast<int>(std::min<std::size_t>(n_jobs, 256)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);

  std::vector<VariantReport> out;
  out.reserve(variants.size());
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    std::vector<CountPair> per_image(counts.begin() + static_cast<std::ptrdiff_t>(vi * scenes.size()),
                                     counts.begin() + static_cast<std::ptrdiff_t>((vi + 1) * scenes.size()));
    out.push_back({variants[vi], compute_metrics(per_image)});
  }
  return out;
}

}  // namespace heatloss
