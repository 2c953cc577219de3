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

#include "clickseg/featherweight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "clickseg/imageproc.hpp"
#include "json.hpp"

namespace clickseg {

using json = nlohmann::json;

const std::array<const char*, kFeatureCount>& feature_names() {
  static const std::array<const char*, kFeatureCount> names = {
      "bias",           "dt_pos",         "dt_neg",   "prev_mask",
      "color_dist_pos", "color_dist_neg", "disk_pos", "disk_neg"};
  return names;
}

bool FeatherweightModel::finite() const {
  return std::all_of(weights.begin(), weights.end(),
                     [](double w) { return std::isfinite(w); });
}

std::string FeatherweightModel::to_json() const {
  json j;
  j["version"] = kFeatherweightVersion;
  j["feature_names"] = json::array();
  for (const char* n : feature_names()) j["feature_names"].push_back(n);
  j["weights"] = weights;
  return j.dump(2);
}

FeatherweightModel FeatherweightModel::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("featherweight model: ") + e.what());
  }
  if (j.value("version", 0) != kFeatherweightVersion) {
    throw PreconditionError("featherweight model: unsupported version");
  }
  const auto names = j.value("feature_names", std::vector<std::string>{});
  const auto& expected = feature_names();
  if (names.size() != expected.size() ||
      !std::equal(names.begin(), names.end(), expected.begin())) {
    throw PreconditionError("featherweight model: feature names do not match v1");
  }
  const auto w = j.value("weights", std::vector<double>{});
  if (w.size() != kFeatureCount) {
    throw PreconditionError("featherweight model: expected 8 weights");
  }
  FeatherweightModel m;
  std::copy(w.begin(), w.end(), m.weights.begin());
  if (!m.finite()) throw PreconditionError("featherweight model: non-finite weight");
  return m;
}

void FeatherweightModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << to_json() << '\n';
}

FeatherweightModel FeatherweightModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Features and prediction
// ---------------------------------------------------------------------------

namespace {

std::array<double, 3> rgb01(const RgbImage& img, int r, int c) {
  const std::uint8_t* px = img.pixel(r, c);
  return {px[0] / 255.0, px[1] / 255.0, px[2] / 255.0};
}

struct PolarityCues {
  DistanceMap dt;  // empty when there are no clicks
  std::array<double, 3> mean_color{};
  bool present = false;
};

PolarityCues cues_for(const PredictorInput& input, Polarity polarity) {
  PolarityCues cues;
  const BinaryMask centers =
      click_mask(input.clicks, polarity, input.height(), input.width());
  if (centers.none()) return cues;
  cues.present = true;
  cues.dt = distance_transform(centers);
  int n = 0;
  for (const Click& c : input.clicks) {
    if (c.polarity != polarity) continue;
    const auto col = rgb01(*input.image, c.row, c.col);
    for (int k = 0; k < 3; ++k) cues.mean_color[k] += col[k];
    ++n;
  }
  for (double& v : cues.mean_color) v /= n;
  return cues;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

std::vector<FeatureVector> extract_features(const PredictorInput& input) {
  input.validate_shapes();
  const int h = input.height();
  const int w = input.width();
  const PolarityCues pos = cues_for(input, Polarity::kPositive);
  const PolarityCues neg = cues_for(input, Polarity::kNegative);
  const GuidanceChannels disks =
      encode_disks(input.clicks, h, w, kFeatureDiskRadius);
  const double sqrt3 = std::sqrt(3.0);

  std::vector<FeatureVector> out(static_cast<std::size_t>(h) * w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = input.prev_mask.index(r, c);
      const auto col = rgb01(*input.image, r, c);
      auto color_dist = [&](const PolarityCues& cues) {
        if (!cues.present) return 1.0;
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
          s += (col[k] - cues.mean_color[k]) * (col[k] - cues.mean_color[k]);
        }
        return std::sqrt(s) / sqrt3;
      };
      auto dt = [&](const PolarityCues& cues) {
        if (!cues.present) return 1.0;
        return std::min(cues.dt[i], kFeatureDistanceCap) / kFeatureDistanceCap;
      };
      out[i] = {1.0,
                dt(pos),
                dt(neg),
                input.prev_mask[i] ? 1.0 : 0.0,
                color_dist(pos),
                color_dist(neg),
                disks.pos[i],
                disks.neg[i]};
    }
  }
  return out;
}

namespace {

ProbMap predict_from_features(const Weights& w,
                              const std::vector<FeatureVector>& features,
                              int height, int width) {
  ProbMap out(height, width);
  for (std::size_t i = 0; i < features.size(); ++i) {
    out[i] = logistic(std::inner_product(w.begin(), w.end(),
                                         features[i].begin(), 0.0));
  }
  return out;
}

}  // namespace

ProbMap featherweight_predict(const FeatherweightModel& model,
                              const PredictorInput& input) {
  return predict_from_features(model.weights, extract_features(input),
                               input.height(), input.width());
}

FeatherweightPredictor::FeatherweightPredictor(FeatherweightModel model)
    : model_(model) {
  if (!model_.finite()) throw PreconditionError("featherweight weights must be finite");
}

ProbMap FeatherweightPredictor::run(const PredictorInput& input) const {
  return featherweight_predict(model_, input);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

WeightGradient loss_and_weight_gradient(const FeatherweightModel& model,
                                        const PredictorInput& input,
                                        const BinaryMask& target,
                                        const LossConfig& loss) {
  const auto features = extract_features(input);
  const ProbMap p =
      predict_from_features(model.weights, features, input.height(), input.width());
  const LossResult lr = compute_loss(p, target, loss);
  WeightGradient out;
  out.value = lr.value;
  for (std::size_t i = 0; i < features.size(); ++i) {
    // dp/dz of the logistic
    const double dz = lr.grad[i] * p[i] * (1.0 - p[i]);
    for (int k = 0; k < kFeatureCount; ++k) out.grad[k] += dz * features[i][k];
  }
  return out;
}

TrainResult train_featherweight(const std::vector<InstanceRecord>& dataset,
                                const TrainConfig& cfg, Rng& rng) {
  if (dataset.empty()) throw PreconditionError("training dataset is empty");
  if (cfg.epochs < 0) throw PreconditionError("epochs must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw PreconditionError("learning rate must be > 0");
  cfg.sampling.validate();
  cfg.loss.validate();
  cfg.encoding.validate();

  TrainResult result;
  result.model = cfg.init;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const InstanceRecord& rec = dataset[idx];
      const FeatherweightPredictor current(result.model);
      const TrainingInteraction inter = generate_training_interaction(
          rec.mask, rec.image, current, cfg.sampling, rng, cfg.encoding);
      const PredictorInput input =
          make_predictor_input(rec.image, inter.clicks, inter.prev_mask, cfg.encoding);
      WeightGradient g = loss_and_weight_gradient(result.model, input, rec.mask, cfg.loss);

      double norm = 0.0;
      for (double v : g.grad) norm += v * v;
      norm = std::sqrt(norm);
      if (!std::isfinite(g.value) || !std::isfinite(norm)) {
        std::ostringstream msg;
        msg << "featherweight training diverged at epoch " << epoch
            << ", instance '" << rec.instance_id << "': loss " << g.value
            << ", gradient norm " << norm << ", weights " << result.model.to_json();
        throw DivergenceError(msg.str());
      }
      const double scale =
          (cfg.grad_clip > 0.0 && norm > cfg.grad_clip) ? cfg.grad_clip / norm : 1.0;
      for (int k = 0; k < kFeatureCount; ++k) {
        result.model.weights[k] -= cfg.learning_rate * scale * g.grad[k];
      }
      total += g.value;
      ++result.log.steps;
    }
    result.log.epoch_loss.push_back(total / static_cast<double>(dataset.size()));
  }
  return result;
}

}  // namespace clickseg
