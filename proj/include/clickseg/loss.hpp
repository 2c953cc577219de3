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

// Segmentation losses with analytic per-pixel gradients.
//
// All losses take the predicted foreground probability and a binary target.
// Internally p = pred where target = 1 and p = 1 - pred where target = 0, so p
// is the confidence assigned to the true class. Probabilities are clamped to
// [eps, 1 - eps] before logs and powers. BCE and focal use sum reduction.
//
//   bce       = sum -log p
//   focal     = sum (1 - p)^gamma * -log p
//   nfl       = focal / P,   P = sum (1 - p)^gamma
//   soft_iou  = 1 - sum(pred * y) / sum(pred + y - pred * y)
//
// The normalized focal gradient treats P as a constant: no gradient flows
// through the normalizer. With that convention the per-pixel weights w / P sum
// to one and the total gradient magnitude tracks plain BCE instead of fading
// as predictions improve.

#pragma once

#include <string>

#include "clickseg/core.hpp"

namespace clickseg {

enum class LossKind { kBce, kFocal, kNfl, kSoftIou };

struct LossConfig {
  LossKind kind = LossKind::kNfl;
  double gamma = 2.0;
  double eps = 1e-12;

  void validate() const;
  static LossKind parse_kind(const std::string& name);
};

const char* to_string(LossKind kind);

struct LossResult {
  double value = 0.0;
  Grid<double> grad;  // dL/dpred, shaped like pred
  /// Focal normalizer P; only set by nfl.
  double normalizer = 0.0;
};

/// Raised by nfl when the focal weight total P underflows to zero.
class DegenerateNormalizerError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

LossResult bce(const ProbMap& pred, const BinaryMask& target,
               const LossConfig& cfg = {});
LossResult focal(const ProbMap& pred, const BinaryMask& target,
                 const LossConfig& cfg = {});
LossResult nfl(const ProbMap& pred, const BinaryMask& target,
               const LossConfig& cfg = {});
LossResult soft_iou(const ProbMap& pred, const BinaryMask& target,
                    const LossConfig& cfg = {});

/// Dispatches on cfg.kind.
LossResult compute_loss(const ProbMap& pred, const BinaryMask& target,
                        const LossConfig& cfg);

}  // namespace clickseg
