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

// Click generation: the deterministic evaluation clicker, random clicks for
// training, and iterative clicks drawn from eroded error regions.

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "clickseg/core.hpp"
#include "clickseg/encoding.hpp"
#include "clickseg/predictor.hpp"

namespace clickseg {

using Rng = std::mt19937_64;

/// Independent stream for worker `worker` derived from a base seed.
inline Rng worker_rng(std::uint64_t seed, std::uint64_t worker) {
  return Rng(seed + worker);
}

struct SamplingConfig {
  int n_iters_max = 3;
  int max_random_pos = 10;
  int max_random_neg = 10;
  double boundary_margin = 5.0;
  double min_click_gap = 10.0;
  double neg_ring_width = 40.0;  // outer radius of the negative ring
  std::uint64_t rng_seed = 0;

  void validate() const;
};

struct ErrorRegions {
  BinaryMask false_negative;  // gt and not pred
  BinaryMask false_positive;  // pred and not gt
};

ErrorRegions error_regions(const BinaryMask& pred, const BinaryMask& gt);

/// The single erroneous 8-connected component with the largest area. FN and FP
/// components compete together; ties go to the component whose first pixel
/// comes earliest in row-major order.
struct ErrorComponent {
  BinaryMask mask;
  Polarity polarity = Polarity::kPositive;  // positive = false negative
  std::size_t area = 0;
  std::size_t first_pixel = 0;
};

std::optional<ErrorComponent> largest_error_component(const BinaryMask& pred,
                                                      const BinaryMask& gt);

/// Evaluation clicker: the interior-distance argmax (row-major tie-break) of
/// the largest erroneous component. nullopt iff pred == gt. The returned
/// click has order 0; callers renumber.
std::optional<Click> simulate_eval_click(const BinaryMask& pred,
                                         const BinaryMask& gt);

/// Random positive clicks inside gt and negative clicks in a ring around it.
/// Throws PreconditionError on an empty gt.
ClickList sample_random_clicks(const BinaryMask& gt, const SamplingConfig& cfg,
                               Rng& rng);

/// One click drawn uniformly from the quarter-area erosion of the largest
/// erroneous component. nullopt iff pred == gt.
std::optional<Click> sample_iterative_click(const BinaryMask& pred,
                                            const BinaryMask& gt, Rng& rng);

struct TrainingInteraction {
  ClickList clicks;
  BinaryMask prev_mask;
  int iterations_drawn = 0;    // m ~ U{0..n_iters_max}
  int iterations_applied = 0;  // iterative clicks actually appended
};

/// Random clicks followed by up to m model-in-the-loop iterative clicks.
/// prev_mask is the mask in force for the next prediction (all-zero if no
/// iteration ran). Predictor exceptions propagate.
TrainingInteraction generate_training_interaction(
    const BinaryMask& gt, const ImagePtr& image, const Predictor& predictor,
    const SamplingConfig& cfg, Rng& rng, const EncodingConfig& encoding = {},
    double binarize_threshold = 0.5);

}  // namespace clickseg
