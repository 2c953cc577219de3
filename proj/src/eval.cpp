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

#include "clickseg/eval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <sstream>
#include <thread>

#include "clickseg/imageproc.hpp"
#include "clickseg/sampling.hpp"
#include "json.hpp"

namespace clickseg {

using json = nlohmann::json;

void EvalConfig::validate() const {
  if (iou_thresholds.empty()) throw PreconditionError("at least one IoU threshold");
  for (double t : iou_thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw PreconditionError("IoU thresholds must lie in (0,1)");
  }
  if (max_clicks < 1) throw PreconditionError("max_clicks must be >= 1");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
    throw PreconditionError("binarize threshold must lie in (0,1)");
  }
  if (jobs < 1) throw PreconditionError("jobs must be >= 1");
  encoding.validate();
}

double EvalConfig::max_threshold() const {
  return *std::max_element(iou_thresholds.begin(), iou_thresholds.end());
}

std::string threshold_key(double threshold) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", threshold);
  if (std::stod(buf) != threshold) std::snprintf(buf, sizeof(buf), "%.6g", threshold);
  return buf;
}

InstanceResult evaluate_instance(const std::string& id, const ImagePtr& image,
                                 const BinaryMask& gt, const Predictor& predictor,
                                 const EvalConfig& cfg) {
  cfg.validate();
  if (!image) throw PreconditionError("instance '" + id + "' has no image");
  require_same_shape(*image, gt, "instance '" + id + "'");
  if (gt.none()) throw PreconditionError("instance '" + id + "' has an empty mask");

  InstanceResult out;
  out.id = id;
  for (double t : cfg.iou_thresholds) {
    out.noc[threshold_key(t)] = cfg.max_clicks;
    out.reached[threshold_key(t)] = false;
  }
  const double stop_at = cfg.max_threshold();
  const BinaryMask empty(gt.height(), gt.width());
  BinaryMask pred = empty;

  try {
    for (int k = 1; k <= cfg.max_clicks; ++k) {
      auto click = simulate_eval_click(pred, gt);
      if (!click) break;
      click->order = static_cast<int>(out.clicks.size());
      out.clicks.push_back(*click);

      const PredictorInput input = make_predictor_input(
          image, out.clicks, cfg.disable_prev_mask ? empty : pred, cfg.encoding);
      pred = binarize(predictor.predict(input), cfg.binarize_threshold);
      const double score = iou(pred, gt);
      out.iou_trace.push_back(score);
      for (double t : cfg.iou_thresholds) {
        const std::string key = threshold_key(t);
        if (!out.reached[key] && score >= t) {
          out.reached[key] = true;
          out.noc[key] = k;
        }
      }
      if (score >= stop_at) break;
    }
  } catch (const std::exception& e) {
    spdlog::error("instance '{}': predictor failed on click {}: {}", id,
                  out.clicks.size(), e.what());
    out.error = e.what();
  }
  return out;
}

EvalAggregates aggregate(const std::vector<InstanceResult>& instances,
                         const EvalConfig& cfg) {
  EvalAggregates agg;
  const bool convergence = cfg.max_clicks >= 100;
  if (convergence) agg.ge100.emplace();
  for (double t : cfg.iou_thresholds) {
    const std::string key = threshold_key(t);
    double sum = 0.0;
    int ge20 = 0;
    int ge100 = 0;
    for (const InstanceResult& r : instances) {
      const int n = r.noc.at(key);
      const bool reached = r.reached.at(key);
      sum += n;
      if (!reached || n > 20) ++ge20;
      if (!reached || n > 100) ++ge100;
    }
    agg.noc[key] = instances.empty() ? 0.0 : sum / static_cast<double>(instances.size());
    agg.ge20[key] = ge20;
    if (convergence) (*agg.ge100)[key] = ge100;
  }
  EvalReport tmp;
  tmp.config = cfg;
  tmp.instances = instances;
  agg.mean_iou_curve = mean_iou_curve(tmp);
  return agg;
}

EvalReport run_noc(const std::vector<InstanceRecord>& dataset,
                   const PredictorSource& predictors, const EvalConfig& cfg,
                   const std::string& predictor_name) {
  cfg.validate();
  if (dataset.empty()) throw PreconditionError("evaluation dataset is empty");

  std::vector<const InstanceRecord*> order;
  for (const InstanceRecord& r : dataset) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(),
                   [](const InstanceRecord* a, const InstanceRecord* b) {
                     return a->instance_id < b->instance_id;
                   });

  EvalReport report;
  report.config = cfg;
  report.predictor = predictor_name;
  report.instances.resize(order.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < order.size(); i = next++) {
      const InstanceRecord& rec = *order[i];
      const PredictorPtr predictor = predictors(rec.mask);
      report.instances[i] =
          evaluate_instance(rec.instance_id, rec.image, rec.mask, *predictor, cfg);
    }
  };
  const int jobs = std::min<int>(cfg.jobs, static_cast<int>(order.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  report.aggregates = aggregate(report.instances, cfg);
  return report;
}

std::vector<double> mean_iou_curve(const EvalReport& report) {
  const int k_max = report.config.max_clicks;
  std::vector<double> curve(static_cast<std::size_t>(k_max), 0.0);
  if (report.instances.empty()) return curve;
  for (const InstanceResult& r : report.instances) {
    for (int k = 0; k < k_max; ++k) {
      double v = 0.0;
      if (!r.iou_trace.empty()) {
        v = r.iou_trace[std::min<std::size_t>(k, r.iou_trace.size() - 1)];
      }
      curve[k] += v;
    }
  }
  for (double& v : curve) v /= static_cast<double>(report.instances.size());
  return curve;
}

double max_single_step_drop(const std::vector<double>& curve) {
  double worst = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k) {
    worst = std::max(worst, curve[k - 1] - curve[k]);
  }
  return worst;
}

std::string EvalReport::to_json() const {
  json j;
  j["config"] = {{"iou_thresholds", config.iou_thresholds},
                 {"max_clicks", config.max_clicks},
                 {"binarize_threshold", config.binarize_threshold},
                 {"encoding", config.encoding.to_string()},
                 {"disable_prev_mask", config.disable_prev_mask},
                 {"predictor", predictor}};
  j["instances"] = json::array();
  for (const InstanceResult& r : instances) {
    json clicks = json::array();
    for (const Click& c : r.clicks) {
      clicks.push_back({{"row", c.row},
                        {"col", c.col},
                        {"polarity", to_string(c.polarity)},
                        {"order", c.order}});
    }
    json inst = {{"id", r.id},
                 {"noc", r.noc},
                 {"reached", r.reached},
                 {"iou_trace", r.iou_trace},
                 {"clicks", clicks}};
    if (r.error) inst["error"] = *r.error;
    j["instances"].push_back(std::move(inst));
  }
  j["aggregates"] = {{"noc", aggregates.noc},
                     {"ge20", aggregates.ge20},
                     {"mean_iou_curve", aggregates.mean_iou_curve}};
  j["aggregates"]["ge100"] =
      aggregates.ge100 ? json(*aggregates.ge100) : json(nullptr);
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "id";
  std::vector<std::string> keys;
  for (double t : config.iou_thresholds) keys.push_back(threshold_key(t));
  for (const auto& k : keys) out << ",noc@" << k;
  out << ",clicks,final_iou,error\n";
  for (const InstanceResult& r : instances) {
    out << r.id;
    for (const auto& k : keys) out << ',' << r.noc.at(k);
    out << ',' << r.clicks.size() << ',';
    if (!r.iou_trace.empty()) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", r.iou_trace.back());
      out << buf;
    }
    out << ',';
    if (r.error) {
      std::string e = *r.error;
      std::replace(e.begin(), e.end(), ',', ';');
      std::replace(e.begin(), e.end(), '\n', ' ');
      out << e;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace clickseg
