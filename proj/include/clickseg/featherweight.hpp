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

// A per-pixel logistic model over the guidance channels. Small enough to train
// in seconds, which lets the full click-simulation / mask-guidance / loss
// pipeline run end to end without a neural backbone.
//
// Feature spec, version 1 (order is part of the model file format):
//   0 bias                  constant 1
//   1 dt_pos                min(d, 64) / 64 to the nearest positive click
//   2 dt_neg                same for negative clicks
//   3 prev_mask             previous binarized mask, {0,1}
//   4 color_dist_pos        |rgb - mean rgb under positive clicks| / sqrt(3)
//   5 color_dist_neg        same for negative clicks
//   6 disk_pos              radius-5 disk encoding of positive clicks
//   7 disk_neg              radius-5 disk encoding of negative clicks
// A polarity without clicks yields 1 for its distance features and 0 for its
// disk feature.

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "clickseg/datasets.hpp"
#include "clickseg/loss.hpp"
#include "clickseg/predictor.hpp"
#include "clickseg/sampling.hpp"

namespace clickseg {

inline constexpr int kFeatherweightVersion = 1;
inline constexpr int kFeatureCount = 8;
inline constexpr double kFeatureDistanceCap = 64.0;
inline constexpr int kFeatureDiskRadius = 5;

using Weights = std::array<double, kFeatureCount>;
using FeatureVector = std::array<double, kFeatureCount>;

const std::array<const char*, kFeatureCount>& feature_names();

struct FeatherweightModel {
  Weights weights{};

  bool finite() const;
  void save(const std::filesystem::path& path) const;
  static FeatherweightModel load(const std::filesystem::path& path);
  std::string to_json() const;
  static FeatherweightModel from_json(const std::string& text);

  friend bool operator==(const FeatherweightModel&,
                         const FeatherweightModel&) = default;
};

/// Per-pixel features, row-major.
std::vector<FeatureVector> extract_features(const PredictorInput& input);

ProbMap featherweight_predict(const FeatherweightModel& model,
                              const PredictorInput& input);

class FeatherweightPredictor final : public Predictor {
 public:
  explicit FeatherweightPredictor(FeatherweightModel model);
  std::string name() const override { return "featherweight"; }
  const FeatherweightModel& model() const { return model_; }

 protected:
  ProbMap run(const PredictorInput& input) const override;

 private:
  FeatherweightModel model_;
};

struct TrainConfig {
  SamplingConfig sampling;
  LossConfig loss;
  EncodingConfig encoding;
  double learning_rate = 2.0;
  int epochs = 12;
  /// Global-norm clip on each step's weight gradient; 0 disables.
  double grad_clip = 5.0;
  FeatherweightModel init{};
};

struct TrainLog {
  std::vector<double> epoch_loss;  // mean loss per epoch
  std::size_t steps = 0;
};

struct TrainResult {
  FeatherweightModel model;
  TrainLog log;
};

/// Raised when a step produces a non-finite loss or weights.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Loss value and d(loss)/d(weights) for one input/target pair.
struct WeightGradient {
  double value = 0.0;
  Weights grad{};
};

WeightGradient loss_and_weight_gradient(const FeatherweightModel& model,
                                        const PredictorInput& input,
                                        const BinaryMask& target,
                                        const LossConfig& loss);

/// SGD over the instances. Each step simulates a fresh interaction with the
/// current model (random clicks, then up to n_iters_max iterative clicks with
/// mask feedback), then updates the weights on the chosen loss.
TrainResult train_featherweight(const std::vector<InstanceRecord>& dataset,
                                const TrainConfig& cfg, Rng& rng);

}  // namespace clickseg
