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

// The predictor contract. Every segmenter sees the same guidance: the color
// image, a positive-click channel, a negative-click channel and the binarized
// mask from the previous interaction (all-zero on the first one).

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "clickseg/core.hpp"
#include "clickseg/encoding.hpp"

namespace clickseg {

struct PredictorInput {
  ImagePtr image;
  GuidanceChannels guidance;
  BinaryMask prev_mask;
  /// The clicks the guidance channels were encoded from. In-process predictors
  /// may read click coordinates directly; the wire format carries channels
  /// only.
  ClickList clicks;

  int height() const { return prev_mask.height(); }
  int width() const { return prev_mask.width(); }

  /// Throws ShapeError when the spatial shapes disagree.
  void validate_shapes() const;
  /// True when there is something to segment from: a positive guidance pixel
  /// or a nonempty prev_mask.
  bool has_guidance() const;
};

PredictorInput make_predictor_input(ImagePtr image, const ClickList& clicks,
                                    BinaryMask prev_mask,
                                    const EncodingConfig& encoding = {});

class Predictor {
 public:
  virtual ~Predictor() = default;

  /// Checks the contract, runs the model and clamps the result into [0,1].
  /// Throws ShapeError on inconsistent shapes and PreconditionError when the
  /// input carries neither a positive click nor a previous mask.
  ProbMap predict(const PredictorInput& input) const;

  virtual std::string name() const = 0;

 protected:
  virtual ProbMap run(const PredictorInput& input) const = 0;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

/// Returns the configured ground truth as a {0,1} map. Verifies harnesses.
class OraclePredictor final : public Predictor {
 public:
  explicit OraclePredictor(BinaryMask truth) : truth_(std::move(truth)) {}
  std::string name() const override { return "oracle"; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  BinaryMask truth_;
};

/// Returns the same probability everywhere; 0 makes the constant-empty
/// predictor.
class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(double value = 0.0);
  std::string name() const override { return "constant"; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  double value_;
};

/// Wraps a predictor and replaces prev_mask with all-zero before every call.
/// Used for the mask-guidance ablation.
class MaskDroppingPredictor final : public Predictor {
 public:
  explicit MaskDroppingPredictor(PredictorPtr inner) : inner_(std::move(inner)) {}
  std::string name() const override { return inner_->name() + "+nomask"; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  PredictorPtr inner_;
};

/// Builds the predictor used for one ground-truth instance. Most sources
/// ignore the ground truth; the oracle needs it.
using PredictorSource = std::function<PredictorPtr(const BinaryMask& gt)>;

PredictorSource fixed_predictor(PredictorPtr predictor);
PredictorSource oracle_source();

}  // namespace clickseg
