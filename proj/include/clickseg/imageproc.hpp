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

// Deterministic raster primitives: labeling, exact Euclidean distance
// transforms, binary erosion, IoU and polygon fill.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "clickseg/core.hpp"

namespace clickseg {

enum class Connectivity : int { kFour = 4, kEight = 8 };

struct LabeledRegions {
  /// 0 = background, regions numbered 1..count in order of their first pixel
  /// in a row-major scan.
  Grid<std::int32_t> labels;
  /// region_areas[id - 1] is the pixel count of region id.
  std::vector<std::size_t> region_areas;
  /// Row-major index of the first pixel of each region.
  std::vector<std::size_t> first_pixel;
  Connectivity connectivity = Connectivity::kEight;

  std::size_t count() const { return region_areas.size(); }
  /// Mask of a single region.
  BinaryMask region(std::int32_t id) const;
};

LabeledRegions connected_components(const BinaryMask& mask,
                                    Connectivity connectivity =
                                        Connectivity::kEight);

/// Exact Euclidean distance from every pixel to the nearest 1-pixel. When the
/// mask has no 1-pixels every value is the finite cap height + width.
DistanceMap distance_transform(const BinaryMask& mask);

/// For pixels inside the mask, Euclidean distance to the nearest pixel outside
/// it, where the ring just beyond the image border counts as outside. Zero
/// elsewhere.
DistanceMap interior_distance(const BinaryMask& mask);

/// Binary erosion with a 3x3 square structuring element; out-of-image pixels
/// are 0.
BinaryMask erode(const BinaryMask& mask);

struct QuarterErosion {
  BinaryMask mask;
  int erosions = 0;  // erosion steps reflected in `mask`
};

/// Repeatedly erodes until area <= area(input) / 4. When the next erosion
/// would empty the mask first, the last nonempty mask is returned. Throws
/// PreconditionError on an empty input.
QuarterErosion erode_to_quarter_steps(const BinaryMask& mask);
BinaryMask erode_to_quarter(const BinaryMask& mask);

/// |a ∩ b| / |a ∪ b|; 1 when both are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Even-odd scanline fill: a pixel is set iff its center (col + 0.5,
/// row + 0.5) lies inside the polygon. Needs at least three vertices.
BinaryMask rasterize_polygon(const std::vector<Point2>& vertices, int height,
                             int width);

BinaryMask flip_horizontal(const BinaryMask& m);
BinaryMask flip_vertical(const BinaryMask& m);

}  // namespace clickseg
