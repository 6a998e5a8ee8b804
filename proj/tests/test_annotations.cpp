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

#include <gtest/gtest.h>

#include <cmath>

#include "heatloss/annotations.hpp"
#include "heatloss/rng.hpp"
#include "oracles.hpp"

namespace heatloss {
namespace {

TEST(ComputeSigma, WorkedExamples) {
  EXPECT_DOUBLE_EQ(compute_sigma({0, 0, 4, 6}, {0.0, 1.0}), 9.0);
  EXPECT_NEAR(compute_sigma({0, 0, 4, 6}, {1.0, 3.0}), 3.00037022941226004, 1e-12);
  EXPECT_NEAR(compute_sigma({0, 0, 2, 2}, {2.0, 1.0}), 5.06737946999085467, 1e-12);
}

TEST(ComputeSigma, RejectsBadInput) {
  EXPECT_THROW(compute_sigma({0, 0, 0, 6}, {}), Error);
  EXPECT_THROW(compute_sigma({0, 0, 4, -1}, {}), Error);
  EXPECT_THROW(compute_sigma({0, 0, NAN, 2}, {}), Error);
  EXPECT_THROW(compute_sigma({0, 0, 4, 6}, {1.0, 0.0}), Error);
  EXPECT_THROW(compute_sigma({0, 0, 4, 6}, {-1.0, 3.0}), Error);
}

TEST(ComputeSigma, BoostFactorAboveOneAndVanishing) {
  for (double side = 0.5; side < 40.0; side += 0.5) {
    const BoxAnnotation b{0, 0, side, side};
    const double d = 2.0 * side + 1.0;
    const double boosted = compute_sigma(b, {1.0, 1.0});
    const double plain = compute_sigma(b, {0.0, 1.0});
    // Past D of about 36 the boost is below double resolution.
    if (d < 32.0) EXPECT_GT(boosted, plain);
    EXPECT_GE(boosted, plain);
    EXPECT_NEAR(boosted / plain - 1.0, std::exp(-d), 1e-15);
  }
}

TEST(RenderHeatmap, PeakIsOneAtIntegerCenter) {
  const SceneAnnotation s{16, 12, {{5, 7, 4, 4}}};
  const Grid g = render_heatmap(s, {1.0, 3.0});
  EXPECT_EQ(g.width(), 16);
  EXPECT_EQ(g.height(), 12);
  EXPECT_EQ(g(5, 7), 1.0);
  for (double v : g.values()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(RenderHeatmap, HalfMaximumRadius) {
  // Pick a box whose sigma puts the half-maximum radius exactly on a pixel:
  // with eta = 0 sigma = D / eps, so choose eps so that sigma sqrt(2 ln 2) = 3.
  const double target_sigma = 3.0 / std::sqrt(2.0 * std::log(2.0));
  const double d = 2.0 * 4.0 + 1.0;
  const SceneAnnotation s{20, 20, {{10, 10, 4, 4}}};
  const Grid g = render_heatmap(s, {0.0, d / target_sigma});
  EXPECT_NEAR(g(13, 10), 0.5, 1e-12);
  EXPECT_NEAR(g(10, 7), 0.5, 1e-12);
}

TEST(RenderHeatmap, OverlapTakesElementwiseMaximum) {
  const SceneAnnotation s{24, 16, {{8, 8, 6, 5}, {12.5, 7.25, 4, 9}}};
  const SigmaParams sp{1.0, 3.0};
  const Grid g = render_heatmap(s, sp);
  const double s0 = compute_sigma(s.boxes[0], sp), s1 = compute_sigma(s.boxes[1], sp);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x < s.width; ++x) {
      const double k0 = oracle::gaussian(x, y, 8, 8, s0);
      const double k1 = oracle::gaussian(x, y, 12.5, 7.25, s1);
      EXPECT_NEAR(g(x, y), std::max(k0, k1), 1e-14 * std::max(k0, k1)) << x << "," << y;
    }
}

TEST(RenderHeatmap, StrideScalesCentersAndSize) {
  const SceneAnnotation s{33, 17, {{16, 8, 8, 8}}};
  const Grid g = render_heatmap(s, {1.0, 3.0}, 4);
  EXPECT_EQ(g.width(), 9);
  EXPECT_EQ(g.height(), 5);
  EXPECT_EQ(g(4, 2), 1.0);
  const double sigma = compute_sigma({4, 2, 2, 2}, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(g(5, 2), oracle::gaussian(5, 2, 4, 2, sigma));
}

TEST(RenderHeatmap, EmptySceneIsZero) {
  const Grid g = render_heatmap({8, 8, {}}, {});
  for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(RenderMask, RectangleMembership) {
  // [2, 5] x [3, 7] inclusive.
  const SceneAnnotation s{10, 10, {{3.5, 5.0, 3.0, 4.0}}};
  const Grid m = render_mask(s);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) {
      const bool inside = x >= 2 && x <= 5 && y >= 3 && y <= 7;
      EXPECT_EQ(m(x, y), inside ? 1.0 : 0.0) << x << "," << y;
    }
}

TEST(RenderMask, EmptyAndSubPixelBox) {
  const Grid empty = render_mask({6, 6, {}});
  for (double v : empty.values()) EXPECT_EQ(v, 0.0);

  const Grid one = render_binary_map({6, 6, {{4, 2, 0.5, 0.5}}});
  double total = 0.0;
  for (double v : one.values()) total += v;
  EXPECT_EQ(total, 1.0);
  EXPECT_EQ(one(4, 2), 1.0);
}

TEST(RenderMask, UnionAndDuplicateIdempotence) {
  const BoxAnnotation a{4, 4, 5, 3}, b{6, 5, 4, 6};
  const Grid ma = render_mask({12, 12, {a}});
  const Grid mb = render_mask({12, 12, {b}});
  const Grid both = render_mask({12, 12, {a, b}});
  for (std::size_t i = 0; i < both.size(); ++i) EXPECT_EQ(both[i], std::max(ma[i], mb[i]));
  EXPECT_EQ(render_mask({12, 12, {a, b, a, b}}), both);
  EXPECT_EQ(render_binary_map({12, 12, {a, b}}), both);
}

TEST(RenderMask, BoxesClipAtBorders) {
  const Grid m = render_mask({5, 5, {{0, 0, 4, 4}}});
  EXPECT_EQ(m(0, 0), 1.0);
  EXPECT_EQ(m(2, 2), 1.0);
  EXPECT_EQ(m(3, 0), 0.0);
}

TEST(Scene, Validation) {
  EXPECT_THROW(render_mask({0, 4, {}}), Error);
  EXPECT_THROW(render_mask({4, 4, {{4, 1, 1, 1}}}), Error);
  EXPECT_THROW(render_mask({4, 4, {{1, 1, 0, 1}}}), Error);
  EXPECT_THROW(render_mask({4, 4, {}}, 0), Error);
}

TEST(GroundTruthProperties, RandomScenes) {
  RandomStream rng(7, 0);
  for (int trial = 0; trial < 50; ++trial) {
    SceneAnnotation s{8 + rng.below(40), 8 + rng.below(40), {}};
    const int n = rng.below(6);
    for (int i = 0; i < n; ++i)
      s.boxes.push_back({static_cast<double>(rng.below(s.width)),
                         static_cast<double>(rng.below(s.height)), rng.uniform(1, 12),
                         rng.uniform(1, 12)});
    const Grid heat = render_heatmap(s, {rng.uniform(0, 3), rng.uniform(0.5, 4)});
    const Grid mask = render_mask(s);
    for (double v : heat.values()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    for (const auto& b : s.boxes) {
      const int x = static_cast<int>(b.cx), y = static_cast<int>(b.cy);
      EXPECT_EQ(heat(x, y), 1.0);
      EXPECT_EQ(mask(x, y), 1.0);
    }
  }
}

const AnchorSet kAnchors{{{0, 0, 10, 10}, {100, 0, 30, 30}}};

TEST(InterpolateBoxes, WorkedExamples) {
  const auto out = interpolate_boxes(kAnchors, {{50, 0}, {0, 0}, {25, 0}});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_DOUBLE_EQ(out[0].w, 20.0);
  EXPECT_DOUBLE_EQ(out[0].h, 20.0);
  EXPECT_DOUBLE_EQ(out[1].w, 10.0);
  EXPECT_DOUBLE_EQ(out[1].h, 10.0);
  EXPECT_DOUBLE_EQ(out[2].w, 15.0);
  EXPECT_DOUBLE_EQ(out[2].h, 15.0);
  EXPECT_EQ(out[2].cx, 25.0);
  EXPECT_EQ(out[2].cy, 0.0);
}

TEST(InterpolateBoxes, SidesInterpolateIndependently) {
  const AnchorSet set{{{0, 0, 10, 20}, {0, 40, 30, 10}}};
  const auto out = interpolate_boxes(set, {{0, 10}});
  EXPECT_DOUBLE_EQ(out[0].w, 10.0 + 0.25 * 20.0);
  EXPECT_DOUBLE_EQ(out[0].h, 20.0 - 0.25 * 10.0);
}

TEST(InterpolateBoxes, SingleAnchorAndTies) {
  const AnchorSet single{{{5, 5, 7, 9}}};
  const auto a = interpolate_boxes(single, {{50, 50}});
  EXPECT_EQ(a[0].w, 7.0);
  EXPECT_EQ(a[0].h, 9.0);

  // B and C are equidistant seconds; B comes first in the set.
  const AnchorSet tie{{{0, 0, 10, 10}, {10, 0, 20, 20}, {-10, 0, 40, 40}}};
  const auto b = interpolate_boxes(tie, {{1, 0}});
  const double da = 1.0, db = 9.0;
  EXPECT_DOUBLE_EQ(b[0].w, 10.0 + da / (da + db) * 10.0);
  const auto c = interpolate_boxes(tie, {{0, 5}});
  EXPECT_DOUBLE_EQ(c[0].w, 10.0 + 5.0 / (5.0 + std::hypot(10.0, 5.0)) * 10.0);
}

TEST(InterpolateBoxes, ExactAtAnchorsAndContinuous) {
  const AnchorSet set{{{0, 0, 10, 12}, {60, 10, 20, 16}, {20, 70, 14, 30}}};
  for (const auto& a : set.anchors) {
    const auto out = interpolate_boxes(set, {{a.cx, a.cy}});
    EXPECT_EQ(out[0].w, a.w);
    EXPECT_EQ(out[0].h, a.h);
  }
  const auto p = interpolate_boxes(set, {{21.0, 5.0}, {21.0 + 1e-7, 5.0}});
  EXPECT_NEAR(p[0].w, p[1].w, 1e-5);
  EXPECT_NEAR(p[0].h, p[1].h, 1e-5);
}

TEST(InterpolateBoxes, Rejects) {
  EXPECT_THROW(interpolate_boxes(AnchorSet{}, {{0, 0}}), Error);
  EXPECT_THROW(interpolate_boxes(AnchorSet{{{1, 1, 2, 2}, {1, 1, 3, 3}}}, {{0, 0}}), Error);
  EXPECT_THROW(interpolate_boxes(kAnchors, {{NAN, 0}}), Error);
}

}  // namespace
}  // namespace heatloss
