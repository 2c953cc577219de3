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

#include "clickseg/core.hpp"

#include <algorithm>
#include <cmath>

#include "clickseg/session.hpp"

namespace clickseg {

std::size_t BinaryMask::area() const {
  return static_cast<std::size_t>(
      std::count_if(data().begin(), data().end(), [](auto v) { return v != 0; }));
}

bool BinaryMask::any() const {
  return std::any_of(data().begin(), data().end(), [](auto v) { return v != 0; });
}

void ProbMap::validate() const {
  for (std::size_t i = 0; i < size(); ++i) {
    const double v = (*this)[i];
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw PreconditionError("probability out of [0,1] at index " +
                              std::to_string(i));
    }
  }
}

RgbImage::RgbImage(int height, int width) : height_(height), width_(width) {
  if (height < 0 || width < 0) throw ShapeError("negative image dimensions");
  data_.assign(pixel_count() * 3, 0);
}

RgbImage::RgbImage(int height, int width, std::vector<std::uint8_t> rgb)
    : height_(height), width_(width), data_(std::move(rgb)) {
  if (height < 0 || width < 0 || data_.size() != pixel_count() * 3) {
    throw ShapeError("image data length does not match " +
                     std::to_string(height) + "x" + std::to_string(width) +
                     "x3");
  }
}

const char* to_string(Polarity p) {
  return p == Polarity::kPositive ? "positive" : "negative";
}

Polarity parse_polarity(const std::string& s) {
  if (s == "positive" || s == "pos") return Polarity::kPositive;
  if (s == "negative" || s == "neg") return Polarity::kNegative;
  throw PreconditionError("unknown click polarity '" + s + "'");
}

void require_in_bounds(const Click& click, int height, int width) {
  if (click.row < 0 || click.col < 0 || click.row >= height ||
      click.col >= width) {
    throw ShapeError("click (" + std::to_string(click.row) + "," +
                     std::to_string(click.col) + ") outside " +
                     std::to_string(height) + "x" + std::to_string(width));
  }
}

BinaryMask binarize(const ProbMap& p, double threshold) {
  BinaryMask out(p.height(), p.width());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = p[i] > threshold ? 1 : 0;
  }
  return out;
}

ProbMap to_prob(const BinaryMask& m) {
  ProbMap out(m.height(), m.width());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// InteractionState
// ---------------------------------------------------------------------------

InteractionState new_session(ImagePtr image,
                             std::optional<BinaryMask> external_mask,
                             double binarize_threshold) {
  if (!image) throw PreconditionError("session requires an image");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
    throw PreconditionError("binarize threshold must lie in (0,1)");
  }
  InteractionState s;
  if (external_mask) {
    require_same_shape(*image, *external_mask, "external mask");
    s.prev_mask_ = std::move(*external_mask);
    for (auto& v : s.prev_mask_.data()) v = v ? 1 : 0;
  } else {
    s.prev_mask_ = BinaryMask(image->height(), image->width());
  }
  s.image_ = std::move(image);
  s.threshold_ = binarize_threshold;
  return s;
}

void InteractionState::push_click(Click click, const ProbMap& new_prediction) {
  require_in_bounds(click, height(), width());
  require_same_shape(prev_mask_, new_prediction, "prediction");
  BinaryMask next = binarize(new_prediction, threshold_);
  click.order = static_cast<int>(clicks_.size());
  history_.push_back({clicks_, prev_mask_});
  clicks_.push_back(click);
  prev_mask_ = std::move(next);
}

void InteractionState::undo() {
  if (history_.empty()) throw PreconditionError("nothing to undo");
  clicks_ = std::move(history_.back().clicks);
  prev_mask_ = std::move(history_.back().prev_mask);
  history_.pop_back();
}

ClickList InteractionState::clicks_with(Click click) const {
  require_in_bounds(click, height(), width());
  ClickList out = clicks_;
  click.order = static_cast<int>(out.size());
  out.push_back(click);
  return out;
}

InteractionState push_click(InteractionState state, const Click& click,
                            const ProbMap& new_prediction) {
  state.push_click(click, new_prediction);
  return state;
}

}  // namespace clickseg
