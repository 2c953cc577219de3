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


// Central finite-difference reference for the loss gradients.

#pragma once

#include <algorithm>
#include <cmath>

#include "clickseg/loss.hpp"

namespace clickseg::testing {

/// Loss value used for differencing. For nfl the normalizer is frozen at its
/// value for `base`, which is how the analytic gradient is defined.
inline double fd_value(const ProbMap& pred, const BinaryMask& target, const LossConfig& cfg,
                       double frozen_normalizer) {
  if (cfg.kind != LossKind::kNfl) return compute_loss(pred, target, cfg).value;
  LossConfig focal_cfg = cfg;
  focal_cfg.kind = LossKind::kFocal;
  return compute_loss(pred, target, focal_cfg).value / frozen_normalizer;
}

/// Largest per-element relative error |a - n| / max(|a|, |n|) between the
/// analytic gradient and central differences with step h.
inline double max_gradient_rel_error(const ProbMap& pred, const BinaryMask& target,
                                     const LossConfig& cfg, double h = 1e-5) {
  const LossResult analytic = compute_loss(pred, target, cfg);
  double worst = 0.0;
  ProbMap probe = pred;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    probe[i] = pred[i] + h;
    const double up = fd_value(probe, target, cfg, analytic.normalizer);
    probe[i] = pred[i] - h;
    const double down = fd_value(probe, target, cfg, analytic.normalizer);
    probe[i] = pred[i];
    const double numeric = (up - down) / (2.0 * h);
    const double a = analytic.grad[i];
    const double scale = std::max({std::abs(a), std::abs(numeric), 1e-300});
    worst = std::max(worst, std::abs(a - numeric) / scale);
  }
  return worst;
}

}  // namespace clickseg::testing
