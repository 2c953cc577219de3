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

#include <optional>
#include <vector>

#include "clickseg/core.hpp"

namespace clickseg {

/// History of one single-object interaction: the clicks placed so far and the
/// mask that will be fed back as guidance on the next prediction.
///
/// A session is single-writer. Copies are independent values.
class InteractionState {
 public:
  struct Snapshot {
    ClickList clicks;
    BinaryMask prev_mask;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
  };

  InteractionState() = default;

  const ImagePtr& image() const { return image_; }
  int height() const { return prev_mask_.height(); }
  int width() const { return prev_mask_.width(); }

  const ClickList& clicks() const { return clicks_; }
  const BinaryMask& prev_mask() const { return prev_mask_; }
  double binarize_threshold() const { return threshold_; }
  std::size_t history_depth() const { return history_.size(); }
  bool can_undo() const { return !history_.empty(); }

  /// Appends `click` (its order is reassigned to the next index), snapshots
  /// the prior state and replaces prev_mask with binarize(new_prediction).
  void push_click(Click click, const ProbMap& new_prediction);

  /// Restores the state in force before the last push_click. Throws
  /// PreconditionError when there is nothing to undo.
  void undo();

  /// Clicks and prev_mask as they would be after `click` is appended, used to
  /// build predictor input without mutating the session.
  ClickList clicks_with(Click click) const;

  friend bool operator==(const InteractionState& a,
                         const InteractionState& b) {
    return a.image_ == b.image_ && a.clicks_ == b.clicks_ &&
           a.prev_mask_ == b.prev_mask_ && a.history_ == b.history_ &&
           a.threshold_ == b.threshold_;
  }

 private:
  friend InteractionState new_session(ImagePtr image,
                                      std::optional<BinaryMask> external_mask,
                                      double binarize_threshold);

  ImagePtr image_;
  ClickList clicks_;
  BinaryMask prev_mask_;
  std::vector<Snapshot> history_;
  double threshold_ = 0.5;
};

/// Starts a session. Without an external mask the guidance mask is all-zero;
/// with one, the session begins in correction mode from that mask.
InteractionState new_session(ImagePtr image,
                             std::optional<BinaryMask> external_mask = {},
                             double binarize_threshold = 0.5);

/// Value-returning form of InteractionState::push_click.
InteractionState push_click(InteractionState state, const Click& click,
                            const ProbMap& new_prediction);

}  // namespace clickseg
