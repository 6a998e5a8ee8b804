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

#include "heatloss/loss.hpp"
#include "heatloss/rng.hpp"

namespace heatloss {

inline constexpr double kGradCheckStep = 1e-6;
inline constexpr double kGradCheckTolerance = 1e-6;

struct LossInstance {
  Grid pred;
  GroundTruthBundle gt;
  LossConfig cfg;
};

/// Random prediction, ground truth and hyper-parameters valid for `variant`.
/// Predictions stay in [0.01, 0.99] and at least 1e-3 away from the heatmap on
/// mask pixels, so central differences never straddle the clamp or the |p - q| kink.
LossInstance random_instance(LossVariant variant, int size, RandomStream& rng);

/// max over pixels of |analytic - central difference| / (1 + |analytic|).
double gradient_deviation(const LossInstance& instance, double step = kGradCheckStep);

struct GradCheckReport {
  int instances = 0;
  double max_deviation = 0.0;
  int worst_instance = -1;
};

GradCheckReport grad_check(LossVariant variant, int instances, int size, std::uint64_t seed);

}  // namespace heatloss
