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

#include <string>

#include "clickseg/core.hpp"

namespace clickseg {

enum class EncodingScheme { kDisk, kDistanceTransform };

struct EncodingConfig {
  EncodingScheme scheme = EncodingScheme::kDisk;
  int disk_radius = 5;
  double dt_cap = 255.0;

  void validate() const;
  /// "disk:5" or "dt:255"
  std::string to_string() const;
  static EncodingConfig parse(const std::string& spec);
};

/// Positive and negative click channels, each shaped like the image.
struct GuidanceChannels {
  Grid<double> pos;
  Grid<double> neg;
};

/// Pixel is 1 iff it lies within `radius` (Euclidean) of a same-polarity
/// click.
GuidanceChannels encode_disks(const ClickList& clicks, int height, int width,
                              int radius);

/// 1 - min(d, cap) / cap, where d is the distance to the nearest
/// same-polarity click. A polarity without clicks yields an all-zero channel.
GuidanceChannels encode_distance_transform(const ClickList& clicks, int height,
                                           int width, double cap);

GuidanceChannels encode(const ClickList& clicks, int height, int width,
                        const EncodingConfig& cfg);

/// Mask of pixels holding at least one click of `polarity`.
BinaryMask click_mask(const ClickList& clicks, Polarity polarity, int height,
                      int width);

}  // namespace clickseg
