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

#include "heatloss/loss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace heatloss {

namespace {

constexpr std::array<std::pair<LossVariant, std::string_view>, 6> kVariantNames{{
    {LossVariant::kFocalScalar, "FOCAL_SCALAR"},
    {LossVariant::kAlphaFocal, "ALPHA_FOCAL"},
    {LossVariant::kHeatmapFocal, "HEATMAP_FOCAL"},
    {LossVariant::kMaskFocal, "MASK_FOCAL"},
    {LossVariant::kPoly1Pixelwise, "POLY1_PIXELWISE"},
    {LossVariant::kMaskFocalPoly1, "MASK_FOCAL_POLY1"},
}};

// Per-pixel bracket value and its derivative with respect to the clamped
// prediction q.
struct Term {
  double value = 0.0;
  double slope = 0.0;
};

// d/dx x^e, with the e = 0 case pinned to 0 so that 0 * inf never appears.
double dpow(double x, double e) { return e == 0.0 ? 0.0 : e * std::pow(x, e - 1.0); }

// (1-q)^g ln q
Term positive_focal(double q, double g) {
  const double one_minus = 1.0 - q;
  const double lq = std::log(q);
  return {std::pow(one_minus, g) * lq, -dpow(one_minus, g) * lq + std::pow(one_minus, g) / q};
}

// q^g ln(1-q)
Term negative_focal(double q, double g) {
  const double one_minus = 1.0 - q;
  const double l1q = std::log(one_minus);
  return {std::pow(q, g) * l1q, dpow(q, g) * l1q - std::pow(q, g) / one_minus};
}

// Terms of the mask branch, written in d = |p - q|; the caller applies dd/dq.
struct DeltaTerm {
  double value = 0.0;
  double slope_d = 0.0;
};

// d^g ln(1-d)
DeltaTerm delta_focal(double d, double g) {
  const double l1d = std::log(1.0 - d);
  if (d == 0.0) return {0.0, 0.0};
  return {std::pow(d, g) * l1d, dpow(d, g) * l1d - std::pow(d, g) / (1.0 - d)};
}

struct MaskDelta {
  double d = 0.0;
  double sign = 0.0;  // dd/dq, 0 at p == q
};

MaskDelta mask_delta(double p, double q, double clamp) {
  MaskDelta m;
  const double diff = q - p;
  m.sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  m.d = std::abs(diff);
  if (m.d > 1.0 - clamp) {
    m.d = 1.0 - clamp;
    m.sign = 0.0;
  }
  return m;
}

bool is_binary(double v) { return v == 0.0 || v == 1.0; }

template <typename TermFn>
LossResult evaluate(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg,
                    double scale_numerator, bool normalise, TermFn&& term) {
  require(pred.same_shape(gt.heatmap), ErrorCode::kDimMismatch, [&] {
    return "prediction is " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
           " but ground truth is " + std::to_string(gt.heatmap.width()) + "x" +
           std::to_string(gt.heatmap.height());
  });
  LossResult result;
  double n = 1.0;
  if (normalise) {
    if (gt.n_objects == 0) {
      result.degenerate_n = true;
    } else {
      n = static_cast<double>(gt.n_objects);
    }
  }
  const double scale = -scale_numerator / n;
  const bool has_mask = !gt.mask.empty();
  const double lo = cfg.clamp;
  const double hi = 1.0 - cfg.clamp;

  result.grad = Grid(pred.width(), pred.height(), 0.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double raw = pred[i];
    require(std::isfinite(raw), ErrorCode::kInvalidArgument, [&] {
      return "prediction value at index " + std::to_string(i) + " is not finite";
    });
    const double q = std::clamp(raw, lo, hi);
    const bool active = raw >= lo && raw <= hi;
    const double mask = has_mask ? gt.mask[i] : 0.0;
    const Term t = term(gt.heatmap[i], mask, q);
    sum += t.value;
    result.grad[i] = active ? scale * t.slope : 0.0;
  }
  result.value = scale * sum;
  return result;
}

}  // namespace

std::string_view variant_name(LossVariant v) noexcept {
  for (const auto& [variant, name] : kVariantNames)
    if (variant == v) return name;
  return "UNKNOWN";
}

std::optional<LossVariant> parse_variant(std::string_view name) noexcept {
  for (const auto& [variant, n] : kVariantNames)
    if (n == name) return variant;
  return std::nullopt;
}

void LossConfig::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, ErrorCode::kInvalidArgument, "alpha must be > 0");
  require(std::isfinite(beta) && beta >= 0.0, ErrorCode::kInvalidArgument, "beta must be >= 0");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::kInvalidArgument,
          "gamma must be >= 0");
  require(std::isfinite(eps1), ErrorCode::kInvalidArgument, "eps1 must be finite");
  require(std::isfinite(clamp) && clamp > 0.0 && clamp < 0.5, ErrorCode::kInvalidArgument,
          "clamp must lie in (0, 0.5)");
}

double focal_scalar(const ScalarSample& sample, double gamma, double clamp) {
  require(sample.c == 0 || sample.c == 1, ErrorCode::kInvalidArgument,
          "class label must be 0 or 1");
  require(std::isfinite(sample.p) && sample.p >= 0.0 && sample.p <= 1.0,
          ErrorCode::kInvalidArgument, "probability must lie in [0, 1]");
  require(std::isfinite(gamma) && gamma >= 0.0, ErrorCode::kInvalidArgument,
          "gamma must be >= 0");
  require(std::isfinite(clamp) && clamp > 0.0 && clamp < 0.5, ErrorCode::kInvalidArgument,
          "clamp must lie in (0, 0.5)");
  const double p = std::clamp(sample.p, clamp, 1.0 - clamp);
  const double pt = sample.c == 1 ? p : 1.0 - p;
  return -std::pow(1.0 - pt, gamma) * std::log(pt);
}

void validate_ground_truth(const GroundTruthBundle& gt, LossVariant variant) {
  const Grid& hm = gt.heatmap;
  require(!hm.empty(), ErrorCode::kInvalidGroundTruth, "ground truth heatmap is empty");
  require(gt.n_objects >= 0, ErrorCode::kInvalidGroundTruth, "object count must be >= 0");
  const bool mask_variant =
      variant == LossVariant::kMaskFocal || variant == LossVariant::kMaskFocalPoly1;
  if (mask_variant || !gt.mask.empty()) {
    require(gt.mask.same_shape(hm), ErrorCode::kDimMismatch,
            "ground truth mask and heatmap dimensions differ");
  }
  for (std::size_t i = 0; i < hm.size(); ++i) {
    const double p = hm[i];
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorCode::kInvalidGroundTruth,
            [&] { return "heatmap value at index " + std::to_string(i) + " outside [0, 1]"; });
    if (!gt.mask.empty())
      require(is_binary(gt.mask[i]), ErrorCode::kInvalidGroundTruth,
              [&] { return "mask value at index " + std::to_string(i) + " is not 0 or 1"; });
    switch (variant) {
      case LossVariant::kFocalScalar:
      case LossVariant::kAlphaFocal:
        require(is_binary(p), ErrorCode::kInvalidGroundTruth, [&] {
          return std::string(variant_name(variant)) + " needs a binary heatmap; value at index " +
                 std::to_string(i) + " is " + std::to_string(p);
        });
        break;
      case LossVariant::kMaskFocal:
      case LossVariant::kMaskFocalPoly1:
        require((gt.mask[i] == 1.0) == (p > 0.0), ErrorCode::kInvalidGroundTruth, [&] {
          return "mask must be 1 exactly where the heatmap is positive; index " +
                 std::to_string(i) + " has mask " + std::to_string(gt.mask[i]) + " and heatmap " +
                 std::to_string(p);
        });
        break;
      case LossVariant::kHeatmapFocal:
      case LossVariant::kPoly1Pixelwise:
        break;
    }
  }
}

LossResult eval_focal_grid(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg) {
  cfg.validate();
  validate_ground_truth(gt, LossVariant::kFocalScalar);
  const double g = cfg.gamma;
  return evaluate(pred, gt, cfg, 1.0, false, [g](double p, double, double q) {
    return p == 1.0 ? positive_focal(q, g) : negative_focal(q, g);
  });
}

LossResult eval_alpha_focal(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg) {
  cfg.validate();
  validate_ground_truth(gt, LossVariant::kAlphaFocal);
  const double g = cfg.gamma;
  return evaluate(pred, gt, cfg, cfg.alpha, true, [g](double p, double, double q) {
    return p == 1.0 ? positive_focal(q, g) : negative_focal(q, g);
  });
}

LossResult eval_heatmap_focal(const Grid& pred, const GroundTruthBundle& gt,
                              const LossConfig& cfg) {
  cfg.validate();
  validate_ground_truth(gt, LossVariant::kHeatmapFocal);
  const double g = cfg.gamma;
  const double b = cfg.beta;
  return evaluate(pred, gt, cfg, cfg.alpha, true, [g, b](double p, double, double q) {
    if (p == 1.0) return positive_focal(q, g);
    const double w = std::pow(1.0 - p, b);
    const Term t = negative_focal(q, g);
    return Term{w * t.value, w * t.slope};
  });
}

LossResult eval_mask_focal(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg) {
  cfg.validate();
  validate_ground_truth(gt, LossVariant::kMaskFocal);
  const double g = cfg.gamma;
  const double b = cfg.beta;
  const double clamp = cfg.clamp;
  return evaluate(pred, gt, cfg, cfg.alpha, true, [=](double p, double mask, double q) {
    if (mask == 0.0) return negative_focal(q, g);
    const MaskDelta m = mask_delta(p, q, clamp);
    const double w = std::pow(p, b);
    const DeltaTerm t = delta_focal(m.d, g);
    return Term{w * t.value, w * t.slope_d * m.sign};
  });
}

LossResult eval_poly1(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg) {
  cfg.validate();
  const double g = cfg.gamma;
  const double b = cfg.beta;
  const double e = cfg.eps1;
  const double clamp = cfg.clamp;
  switch (cfg.variant) {
    case LossVariant::kPoly1Pixelwise:
      validate_ground_truth(gt, LossVariant::kPoly1Pixelwise);
      return evaluate(pred, gt, cfg, cfg.alpha, true, [=](double p, double, double q) {
        if (p == 1.0) {
          const Term t = positive_focal(q, g);
          const double r = 1.0 - q;
          return Term{t.value - e * std::pow(r, g + 1.0), t.slope + e * dpow(r, g + 1.0)};
        }
        const double w = std::pow(1.0 - p, b);
        const Term t = negative_focal(q, g);
        return Term{w * (t.value - e * std::pow(q, g + 1.0)),
                    w * (t.slope - e * dpow(q, g + 1.0))};
      });
    case LossVariant::kMaskFocalPoly1:
      validate_ground_truth(gt, LossVariant::kMaskFocalPoly1);
      return evaluate(pred, gt, cfg, cfg.alpha, true, [=](double p, double mask, double q) {
        if (mask == 0.0) {
          const Term t = negative_focal(q, g);
          return Term{t.value - e * std::pow(q, g + 1.0), t.slope - e * dpow(q, g + 1.0)};
        }
        const MaskDelta m = mask_delta(p, q, clamp);
        if (m.d == 0.0) return Term{};
        const DeltaTerm t = delta_focal(m.d, g);
        const double w = e * std::pow(p, b);
        return Term{t.value - w * std::pow(m.d, g + 1.0),
                    (t.slope_d - w * dpow(m.d, g + 1.0)) * m.sign};
      });
    default:
      fail(ErrorCode::kInvalidArgument,
           "eval_poly1 needs POLY1_PIXELWISE or MASK_FOCAL_POLY1, got " +
               std::string(variant_name(cfg.variant)));
  }
}

LossResult loss_with_grad(const Grid& pred, const GroundTruthBundle& gt, const LossConfig& cfg) {
  switch (cfg.variant) {
    case LossVariant::kFocalScalar: return eval_focal_grid(pred, gt, cfg);
    case LossVariant::kAlphaFocal: return eval_alpha_focal(pred, gt, cfg);
    case LossVariant::kHeatmapFocal: return eval_heatmap_focal(pred, gt, cfg);
    case LossVariant::kMaskFocal: return eval_mask_focal(pred, gt, cfg);
    case LossVariant::kPoly1Pixelwise:
    case LossVariant::kMaskFocalPoly1: return eval_poly1(pred, gt, cfg);
  }
  fail(ErrorCode::kInvalidArgument, "unknown loss variant");
}

}  // namespace heatloss
