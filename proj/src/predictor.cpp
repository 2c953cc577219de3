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

#include "clickseg/predictor.hpp"

#include <algorithm>
#include <cmath>

namespace clickseg {

void PredictorInput::validate_shapes() const {
  if (!image) throw ShapeError("predictor input has no image");
  require_same_shape(*image, prev_mask, "prev_mask");
  require_same_shape(*image, guidance.pos, "positive guidance");
  require_same_shape(*image, guidance.neg, "negative guidance");
  for (const Click& c : clicks) require_in_bounds(c, height(), width());
}

bool PredictorInput::has_guidance() const {
  const auto& pos = guidance.pos.data();
  return prev_mask.any() ||
         std::any_of(pos.begin(), pos.end(), [](double v) { return v > 0.0; });
}

PredictorInput make_predictor_input(ImagePtr image, const ClickList& clicks,
                                    BinaryMask prev_mask,
                                    const EncodingConfig& encoding) {
  if (!image) throw ShapeError("predictor input has no image");
  PredictorInput in;
  in.guidance = encode(clicks, image->height(), image->width(), encoding);
  in.image = std::move(image);
  in.prev_mask = std::move(prev_mask);
  in.clicks = clicks;
  in.validate_shapes();
  return in;
}

ProbMap Predictor::predict(const PredictorInput& input) const {
  input.validate_shapes();
  if (!input.has_guidance()) {
    throw PreconditionError(
        "predictor input has no positive click and an empty previous mask");
  }
  ProbMap out = run(input);
  require_same_shape(input.prev_mask, out, name() + " output");
  for (auto& v : out.data()) {
    if (!std::isfinite(v)) {
      throw PreconditionError(name() + " produced a non-finite probability");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

ProbMap OraclePredictor::run(const PredictorInput& input) const {
  require_same_shape(input.prev_mask, truth_, "oracle truth");
  return to_prob(truth_);
}

ConstantPredictor::ConstantPredictor(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw PreconditionError("constant probability must lie in [0,1]");
  }
}

ProbMap ConstantPredictor::run(const PredictorInput& input) const {
  return ProbMap(input.height(), input.width(), value_);
}

ProbMap MaskDroppingPredictor::run(const PredictorInput& input) const {
  PredictorInput stripped = input;
  stripped.prev_mask = BinaryMask(input.height(), input.width());
  return inner_->predict(stripped);
}

PredictorSource fixed_predictor(PredictorPtr predictor) {
  return [p = std::move(predictor)](const BinaryMask&) { return p; };
}

PredictorSource oracle_source() {
  return [](const BinaryMask& gt) -> PredictorPtr {
    return std::make_shared<OraclePredictor>(gt);
  };
}

}  // namespace clickseg
