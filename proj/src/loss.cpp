// Copyright 2026 The clickseg Authors
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

#include "clickseg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clickseg {

void LossConfig::validate() const {
  if (!(gamma >= 0.0)) throw PreconditionError("gamma must be >= 0");
  if (!(eps > 0.0 && eps < 0.5)) throw PreconditionError("eps must lie in (0, 0.5)");
}

LossKind LossConfig::parse_kind(const std::string& name) {
  if (name == "bce") return LossKind::kBce;
  if (name == "focal" || name == "fl") return LossKind::kFocal;
  if (name == "nfl") return LossKind::kNfl;
  if (name == "soft_iou") return LossKind::kSoftIou;
  throw PreconditionError("unknown loss '" + name + "'");
}

const char* to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kBce: return "bce";
    case LossKind::kFocal: return "focal";
    case LossKind::kNfl: return "nfl";
    case LossKind::kSoftIou: return "soft_iou";
  }
  return "?";
}

namespace {

// Per-pixel true-class confidence and the sign of dp/dpred.
struct TrueClass {
  double p;
  double sign;
};

TrueClass true_class(double pred, bool positive, double eps) {
  const double p = positive ? pred : 1.0 - pred;
  return {std::clamp(p, eps, 1.0 - eps), positive ? 1.0 : -1.0};
}

// Shared by bce (gamma = 0 path), focal and nfl: accumulates the unnormalized
// focal value, the focal weight total and d(term)/dpred per pixel.
LossResult focal_sum(const ProbMap& pred, const BinaryMask& target,
                     const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred, target, "loss");
  LossResult out;
  out.grad = Grid<double>(pred.height(), pred.width(), 0.0);
  const double g = cfg.gamma;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto [p, sign] = true_class(pred[i], target[i] != 0, cfg.eps);
    const double q = 1.0 - p;
    const double nll = -std::log(p);
    if (g == 0.0) {
      out.value += nll;
      out.normalizer += 1.0;
      out.grad[i] = sign * (-1.0 / p);
      continue;
    }
    const double w = std::pow(q, g);
    out.value += w * nll;
    out.normalizer += w;
    // d/dp [(1-p)^g * -log p] = g (1-p)^(g-1) log p - (1-p)^g / p
    const double dterm = g * std::pow(q, g - 1.0) * std::log(p) - w / p;
    out.grad[i] = sign * dterm;
  }
  return out;
}

}  // namespace

LossResult bce(const ProbMap& pred, const BinaryMask& target,
               const LossConfig& cfg) {
  LossConfig c = cfg;
  c.gamma = 0.0;
  LossResult r = focal_sum(pred, target, c);
  r.normalizer = 0.0;
  return r;
}

LossResult focal(const ProbMap& pred, const BinaryMask& target,
                 const LossConfig& cfg) {
  LossResult r = focal_sum(pred, target, cfg);
  r.normalizer = 0.0;
  return r;
}

LossResult nfl(const ProbMap& pred, const BinaryMask& target,
               const LossConfig& cfg) {
  LossResult r = focal_sum(pred, target, cfg);
  const double total = r.normalizer;
  // Clamping keeps P >= N * eps^gamma, so only underflow lands here.
  if (!(total >= std::numeric_limits<double>::min()) || !std::isfinite(total)) {
    throw DegenerateNormalizerError(
        "normalized focal loss: focal weight total underflowed to " +
        std::to_string(total));
  }
  r.value /= total;
  for (auto& g : r.grad.data()) g /= total;
  return r;
}

LossResult soft_iou(const ProbMap& pred, const BinaryMask& target,
                    const LossConfig& cfg) {
  cfg.validate();
  require_same_shape(pred, target, "loss");
  double inter = 0.0;
  double uni = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double x = pred[i];
    const double y = target[i] ? 1.0 : 0.0;
    inter += x * y;
    uni += x + y - x * y;
  }
  if (!(uni >= cfg.eps)) throw PreconditionError("soft IoU denominator is zero");
  LossResult out;
  out.value = 1.0 - inter / uni;
  out.grad = Grid<double>(pred.height(), pred.width(), 0.0);
  const double u2 = uni * uni;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double y = target[i] ? 1.0 : 0.0;
    // dI/dx = y, dU/dx = 1 - y
    out.grad[i] = -(y * uni - inter * (1.0 - y)) / u2;
  }
  return out;
}

LossResult compute_loss(const ProbMap& pred, const BinaryMask& target,
                        const LossConfig& cfg) {
  switch (cfg.kind) {
    case LossKind::kBce: return bce(pred, target, cfg);
    case LossKind::kFocal: return focal(pred, target, cfg);
    case LossKind::kNfl: return nfl(pred, target, cfg);
    case LossKind::kSoftIou: return soft_iou(pred, target, cfg);
  }
  throw PreconditionError("unknown loss kind");
}

}  // namespace clickseg
