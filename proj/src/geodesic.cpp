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

#include "clickseg/geodesic.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <utility>

namespace clickseg {

void GeodesicConfig::validate() const {
  if (!(beta >= 0.0)) throw PreconditionError("geodesic beta must be >= 0");
  if (!(temperature > 0.0)) {
    throw PreconditionError("geodesic temperature must be > 0");
  }
  if (!(unseeded_distance >= 0.0)) {
    throw PreconditionError("geodesic unseeded distance must be >= 0");
  }
}

Grid<double> geodesic_distance(const RgbImage& image, const BinaryMask& seeds,
                               double beta) {
  require_same_shape(image, seeds, "geodesic seeds");
  const int h = image.height();
  const int w = image.width();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Grid<double> dist(h, w, kInf);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (seeds[i]) {
      dist[i] = 0.0;
      heap.emplace(0.0, i);
    }
  }

  static constexpr int kDr[8] = {-1, -1, -1, 0, 0, 1, 1, 1};
  static constexpr int kDc[8] = {-1, 0, 1, -1, 1, -1, 0, 1};
  const double diag = std::sqrt(2.0);
  while (!heap.empty()) {
    const auto [d, idx] = heap.top();
    heap.pop();
    if (d > dist[idx]) continue;
    const int r = static_cast<int>(idx / w);
    const int c = static_cast<int>(idx % w);
    const std::uint8_t* a = image.pixel(r, c);
    for (int k = 0; k < 8; ++k) {
      const int nr = r + kDr[k];
      const int nc = c + kDc[k];
      if (nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
      const std::uint8_t* b = image.pixel(nr, nc);
      double color2 = 0.0;
      for (int ch = 0; ch < 3; ++ch) {
        const double delta = (double(a[ch]) - double(b[ch])) / 255.0;
        color2 += delta * delta;
      }
      const double step = (kDr[k] != 0 && kDc[k] != 0) ? diag : 1.0;
      const double nd = d + step * (1.0 + beta * std::sqrt(color2));
      const std::size_t n = dist.index(nr, nc);
      if (nd < dist[n]) {
        dist[n] = nd;
        heap.emplace(nd, n);
      }
    }
  }
  return dist;
}

GeodesicPredictor::GeodesicPredictor(GeodesicConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

ProbMap GeodesicPredictor::run(const PredictorInput& input) const {
  return geodesic_predict(cfg_, input);
}

ProbMap geodesic_predict(const GeodesicConfig& cfg, const PredictorInput& input) {
  cfg.validate();
  input.validate_shapes();
  const int h = input.height();
  const int w = input.width();
  const BinaryMask pos = click_mask(input.clicks, Polarity::kPositive, h, w);
  BinaryMask neg = click_mask(input.clicks, Polarity::kNegative, h, w);
  if (cfg.border_as_negative && neg.none()) {
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (r == 0 || c == 0 || r == h - 1 || c == w - 1) {
          // A positive click on the border keeps its own pixel.
          neg.at(r, c) = pos.at(r, c) ? 0 : 1;
        }
      }
    }
  }

  const Grid<double> d_pos =
      pos.any() ? geodesic_distance(*input.image, pos, cfg.beta)
                : Grid<double>(h, w, cfg.unseeded_distance);
  const Grid<double> d_neg =
      neg.any() ? geodesic_distance(*input.image, neg, cfg.beta)
                : Grid<double>(h, w, cfg.unseeded_distance);

  ProbMap out(h, w);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double logit;
    if (std::isinf(d_pos[i]) && std::isinf(d_neg[i])) {
      logit = 0.0;
    } else {
      logit = (d_neg[i] - d_pos[i]) / cfg.temperature;
    }
    if (input.prev_mask[i]) logit += cfg.logit_bias;
    out[i] = 1.0 / (1.0 + std::exp(-logit));
  }
  return out;
}

}  // namespace clickseg
