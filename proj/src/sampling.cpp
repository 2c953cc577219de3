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

#include "clickseg/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "clickseg/imageproc.hpp"

namespace clickseg {

void SamplingConfig::validate() const {
  if (n_iters_max < 0) throw PreconditionError("n_iters_max must be >= 0");
  if (max_random_pos < 1) throw PreconditionError("max_random_pos must be >= 1");
  if (max_random_neg < 0) throw PreconditionError("max_random_neg must be >= 0");
  if (boundary_margin < 0 || min_click_gap < 0 || neg_ring_width < 0) {
    throw PreconditionError("sampling margins must be >= 0");
  }
}

ErrorRegions error_regions(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred, gt, "error_regions");
  ErrorRegions out{BinaryMask(gt.height(), gt.width()),
                   BinaryMask(gt.height(), gt.width())};
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool g = gt[i] != 0;
    out.false_negative[i] = g && !p;
    out.false_positive[i] = p && !g;
  }
  return out;
}

std::optional<ErrorComponent> largest_error_component(const BinaryMask& pred,
                                                      const BinaryMask& gt) {
  const ErrorRegions err = error_regions(pred, gt);
  std::optional<ErrorComponent> best;
  for (const Polarity polarity : {Polarity::kPositive, Polarity::kNegative}) {
    const BinaryMask& m = polarity == Polarity::kPositive ? err.false_negative
                                                          : err.false_positive;
    const LabeledRegions regions = connected_components(m, Connectivity::kEight);
    for (std::size_t k = 0; k < regions.count(); ++k) {
      const std::size_t area = regions.region_areas[k];
      const std::size_t first = regions.first_pixel[k];
      if (best && (area < best->area ||
                   (area == best->area && first >= best->first_pixel))) {
        continue;
      }
      best = ErrorComponent{regions.region(static_cast<std::int32_t>(k + 1)),
                            polarity, area, first};
    }
  }
  return best;
}

std::optional<Click> simulate_eval_click(const BinaryMask& pred,
                                         const BinaryMask& gt) {
  const auto component = largest_error_component(pred, gt);
  if (!component) return std::nullopt;
  const DistanceMap inner = interior_distance(component->mask);
  // Strict '>' keeps the first maximum in row-major order.
  std::size_t best = component->first_pixel;
  for (std::size_t i = 0; i < inner.size(); ++i) {
    if (component->mask[i] && inner[i] > inner[best]) best = i;
  }
  const int w = gt.width();
  return Click{static_cast<int>(best / w), static_cast<int>(best % w),
               component->polarity, 0};
}

namespace {

// Draws up to `count` pixels from `candidates`, preferring picks that keep a
// pairwise distance of at least `gap`; when that is infeasible the remaining
// picks ignore the gap. Picks are distinct pixels.
std::vector<std::size_t> pick_spread(std::vector<std::size_t> candidates,
                                     int count, double gap, int width,
                                     Rng& rng) {
  std::vector<std::size_t> picked;
  if (count <= 0 || candidates.empty()) return picked;
  std::shuffle(candidates.begin(), candidates.end(), rng);
  std::vector<bool> used(candidates.size(), false);
  const double gap2 = gap * gap;
  auto far_enough = [&](std::size_t p) {
    const double pr = static_cast<double>(p / width);
    const double pc = static_cast<double>(p % width);
    for (std::size_t q : picked) {
      const double dr = pr - static_cast<double>(q / width);
      const double dc = pc - static_cast<double>(q % width);
      if (dr * dr + dc * dc < gap2) return false;
    }
    return true;
  };
  for (std::size_t i = 0;
       i < candidates.size() && picked.size() < static_cast<std::size_t>(count);
       ++i) {
    if (far_enough(candidates[i])) {
      picked.push_back(candidates[i]);
      used[i] = true;
    }
  }
  for (std::size_t i = 0;
       i < candidates.size() && picked.size() < static_cast<std::size_t>(count);
       ++i) {
    if (!used[i]) picked.push_back(candidates[i]);
  }
  return picked;
}

}  // namespace

ClickList sample_random_clicks(const BinaryMask& gt, const SamplingConfig& cfg,
                               Rng& rng) {
  cfg.validate();
  if (gt.none()) {
    throw PreconditionError("random click sampling needs a nonempty mask");
  }
  const int w = gt.width();
  const int k_pos =
      std::uniform_int_distribution<int>(1, cfg.max_random_pos)(rng);
  const int k_neg =
      std::uniform_int_distribution<int>(0, cfg.max_random_neg)(rng);

  const DistanceMap inner = interior_distance(gt);
  std::vector<std::size_t> pos_candidates;
  std::vector<std::size_t> gt_pixels;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt[i]) continue;
    gt_pixels.push_back(i);
    if (inner[i] >= cfg.boundary_margin) pos_candidates.push_back(i);
  }
  if (pos_candidates.empty()) pos_candidates = std::move(gt_pixels);

  const DistanceMap outer = distance_transform(gt);
  std::vector<std::size_t> neg_candidates;
  std::vector<std::size_t> bg_pixels;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i]) continue;
    bg_pixels.push_back(i);
    if (outer[i] >= cfg.boundary_margin && outer[i] <= cfg.neg_ring_width) {
      neg_candidates.push_back(i);
    }
  }
  if (neg_candidates.empty()) neg_candidates = std::move(bg_pixels);

  ClickList clicks;
  for (std::size_t p : pick_spread(std::move(pos_candidates), k_pos,
                                   cfg.min_click_gap, w, rng)) {
    clicks.push_back({static_cast<int>(p / w), static_cast<int>(p % w),
                      Polarity::kPositive, static_cast<int>(clicks.size())});
  }
  for (std::size_t p : pick_spread(std::move(neg_candidates), k_neg,
                                   cfg.min_click_gap, w, rng)) {
    clicks.push_back({static_cast<int>(p / w), static_cast<int>(p % w),
                      Polarity::kNegative, static_cast<int>(clicks.size())});
  }
  return clicks;
}

std::optional<Click> sample_iterative_click(const BinaryMask& pred,
                                            const BinaryMask& gt, Rng& rng) {
  const auto component = largest_error_component(pred, gt);
  if (!component) return std::nullopt;
  const BinaryMask eroded = erode_to_quarter(component->mask);
  std::vector<std::size_t> pixels;
  for (std::size_t i = 0; i < eroded.size(); ++i) {
    if (eroded[i]) pixels.push_back(i);
  }
  const std::size_t pick =
      pixels[std::uniform_int_distribution<std::size_t>(0, pixels.size() - 1)(rng)];
  const int w = gt.width();
  return Click{static_cast<int>(pick / w), static_cast<int>(pick % w),
               component->polarity, 0};
}

TrainingInteraction generate_training_interaction(
    const BinaryMask& gt, const ImagePtr& image, const Predictor& predictor,
    const SamplingConfig& cfg, Rng& rng, const EncodingConfig& encoding,
    double binarize_threshold) {
  cfg.validate();
  if (!image) throw PreconditionError("training interaction needs an image");
  require_same_shape(*image, gt, "training ground truth");

  TrainingInteraction out;
  out.iterations_drawn =
      std::uniform_int_distribution<int>(0, cfg.n_iters_max)(rng);
  out.clicks = sample_random_clicks(gt, cfg, rng);
  out.prev_mask = BinaryMask(gt.height(), gt.width());

  for (int i = 0; i < out.iterations_drawn; ++i) {
    const PredictorInput input =
        make_predictor_input(image, out.clicks, out.prev_mask, encoding);
    BinaryMask pred = binarize(predictor.predict(input), binarize_threshold);
    auto click = sample_iterative_click(pred, gt, rng);
    out.prev_mask = std::move(pred);
    if (!click) break;
    click->order = static_cast<int>(out.clicks.size());
    out.clicks.push_back(*click);
    ++out.iterations_applied;
  }
  return out;
}

}  // namespace clickseg
