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

#pragma once

#include "clickseg/predictor.hpp"

namespace clickseg {

struct GeodesicConfig {
  /// Weight of the color step in the edge cost; colors are scaled to [0,1].
  double beta = 50.0;
  /// Softness of the logistic over the distance difference, in cost units.
  double temperature = 5.0;
  /// Seeds the image border as negative when there are no negative clicks.
  bool border_as_negative = true;
  /// Added to the logit wherever prev_mask is set.
  double logit_bias = 1.0;
  /// Distance assumed for a polarity with no seeds at all (e.g. correcting
  /// an external mask with negative clicks only). Together with logit_bias it
  /// bounds how far such a click reaches into the mask.
  double unseeded_distance = 10.0;

  void validate() const;
};

/// Multi-source shortest paths on the 8-connected pixel grid, edge cost
/// = step length * (1 + beta * |color difference|). Unreached pixels hold
/// +infinity.
Grid<double> geodesic_distance(const RgbImage& image, const BinaryMask& seeds,
                               double beta);

/// Classical seeded segmenter: p = logistic((d_neg - d_pos) / temperature
/// + logit_bias * prev_mask).
class GeodesicPredictor final : public Predictor {
 public:
  explicit GeodesicPredictor(GeodesicConfig cfg = {});
  std::string name() const override { return "geodesic"; }
  const GeodesicConfig& config() const { return cfg_; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  GeodesicConfig cfg_;
};

ProbMap geodesic_predict(const GeodesicConfig& cfg, const PredictorInput& input);

}  // namespace clickseg
