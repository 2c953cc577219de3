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

// Number-of-clicks evaluation.
//
// For each instance the simulated user clicks at the interior-distance center
// of the largest erroneous region of the current prediction (all-zero before
// the first click). Every prediction sees all clicks so far plus the previous
// binarized prediction. The loop stops once IoU reaches the highest threshold
// or after max_clicks clicks. An unreached threshold scores max_clicks.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clickseg/datasets.hpp"
#include "clickseg/encoding.hpp"
#include "clickseg/predictor.hpp"

namespace clickseg {

struct EvalConfig {
  std::vector<double> iou_thresholds{0.85, 0.90};
  int max_clicks = 20;
  double binarize_threshold = 0.5;
  EncodingConfig encoding;
  /// Ablation switch: feed an all-zero previous mask on every step.
  bool disable_prev_mask = false;
  /// Worker threads; instances are independent, report order is fixed.
  int jobs = 1;

  void validate() const;
  double max_threshold() const;
};

/// "0.85", "0.9" -> "0.90"; keys of the per-threshold maps in reports.
std::string threshold_key(double threshold);

struct InstanceResult {
  std::string id;
  /// Clicks needed to reach each threshold, max_clicks when never reached.
  std::map<std::string, int> noc;
  std::map<std::string, bool> reached;
  /// IoU after click 1, 2, ...
  std::vector<double> iou_trace;
  ClickList clicks;
  std::optional<std::string> error;
};

struct EvalAggregates {
  std::map<std::string, double> noc;  // mean over all instances
  /// Instances that did not reach the threshold within 20 clicks.
  std::map<std::string, int> ge20;
  /// Same within 100 clicks; only meaningful when max_clicks >= 100.
  std::optional<std::map<std::string, int>> ge100;
  std::vector<double> mean_iou_curve;
};

struct EvalReport {
  EvalConfig config;
  std::string predictor;
  std::vector<InstanceResult> instances;  // sorted by id
  EvalAggregates aggregates;

  std::string to_json() const;
  std::string to_csv() const;
};

InstanceResult evaluate_instance(const std::string& id, const ImagePtr& image,
                                 const BinaryMask& gt, const Predictor& predictor,
                                 const EvalConfig& cfg);

EvalReport run_noc(const std::vector<InstanceRecord>& dataset,
                   const PredictorSource& predictors, const EvalConfig& cfg,
                   const std::string& predictor_name = "");

/// Mean over instances of IoU after k clicks, k = 1..max_clicks; an instance
/// that stopped early carries its final IoU forward (0 if it has none).
std::vector<double> mean_iou_curve(const EvalReport& report);

/// Recomputes aggregates from report.instances.
EvalAggregates aggregate(const std::vector<InstanceResult>& instances,
                         const EvalConfig& cfg);

/// Largest decrease between consecutive curve points (0 if monotone).
double max_single_step_drop(const std::vector<double>& curve);

}  // namespace clickseg
