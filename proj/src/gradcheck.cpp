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

#include "heatloss/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace heatloss {

LossInstance random_instance(LossVariant variant, int size, RandomStream& rng) {
  require(size >= 1, ErrorCode::kInvalidArgument, "instance size must be >= 1");
  LossInstance inst;
  inst.cfg.variant = variant;
  inst.cfg.alpha = rng.uniform(0.25, 2.0);
  inst.cfg.beta = rng.uniform(0.0, 4.0);
  inst.cfg.gamma = rng.uniform(0.0, 5.0);
  inst.cfg.eps1 = rng.uniform(-1.0, 2.0);
  inst.gt.n_objects = 1 + rng.below(5);

  Grid heat(size, size, 0.0);
  Grid mask(size, size, 0.0);
  for (std::size_t i = 0; i < heat.size(); ++i) {
    switch (variant) {
      case LossVariant::kFocalScalar:
      case LossVariant::kAlphaFocal:
        heat[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
        mask[i] = heat[i];
        break;
      case LossVariant::kHeatmapFocal:
      case LossVariant::kPoly1Pixelwise: {
        const double u = rng.uniform();
        heat[i] = u < 0.15 ? 1.0 : (u < 0.4 ? 0.0 : rng.uniform(0.02, 0.98));
        mask[i] = heat[i] > 0.0 ? 1.0 : 0.0;
        break;
      }
      case LossVariant::kMaskFocal:
      case LossVariant::kMaskFocalPoly1:
        if (rng.uniform() < 0.5) {
          mask[i] = 1.0;
          heat[i] = rng.uniform() < 0.2 ? 1.0 : rng.uniform(0.02, 1.0);
        }
        break;
    }
  }

  const bool mask_variant =
      variant == LossVariant::kMaskFocal || variant == LossVariant::kMaskFocalPoly1;
  Grid pred(size, size, 0.0);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double q = rng.uniform(0.01, 0.99);
    while (mask_variant && std::abs(q - heat[i]) < 1e-3) q = rng.uniform(0.01, 0.99);
    pred[i] = q;
  }
  inst.pred = std::move(pred);
  inst.gt.heatmap = std::move(heat);
  inst.gt.mask = std::move(mask);
  return inst;
}

double gradient_deviation(const LossInstance& instance, double step) {
  const LossResult analytic = loss_with_grad(instance.pred, instance.gt, instance.cfg);
  Grid probe = instance.pred;
  double worst = 0.0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double q = probe[i];
    probe[i] = q + step;
    const double up = loss_with_grad(probe, instance.gt, instance.cfg).value;
    probe[i] = q - step;
    const double down = loss_with_grad(probe, instance.gt, instance.cfg).value;
    probe[i] = q;
    const double fd = (up - down) / (2.0 * step);
    const double g = analytic.grad[i];
    worst = std::max(worst, std::abs(g - fd) / (1.0 + std::abs(g)));
  }
  return worst;
}

GradCheckReport grad_check(LossVariant variant, int instances, int size, std::uint64_t seed) {
  require(instances >= 1, ErrorCode::kInvalidArgument, "grad check needs at least one instance");
  RandomStream rng(seed, static_cast<std::uint64_t>(variant));
  GradCheckReport report;
  report.instances = instances;
  for (int k = 0; k < instances; ++k) {
    const LossInstance inst = random_instance(variant, size, rng);
    const double dev = gradient_deviation(inst);
    if (dev > report.max_deviation || report.worst_instance < 0) {
      report.max_deviation = std::max(report.max_deviation, dev);
      report.worst_instance = k;
    }
  }
  return report;
}

}  // namespace heatloss
