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

#include "clickseg/encoding.hpp"

#include <algorithm>
#include <cmath>

#include "clickseg/imageproc.hpp"

namespace clickseg {

void EncodingConfig::validate() const {
  if (disk_radius < 0) throw PreconditionError("disk radius must be >= 0");
  if (!(dt_cap > 0.0)) throw PreconditionError("dt cap must be > 0");
}

std::string EncodingConfig::to_string() const {
  if (scheme == EncodingScheme::kDisk) {
    return "disk:" + std::to_string(disk_radius);
  }
  // Integral caps print without a trailing fraction.
  const double whole = std::round(dt_cap);
  return "dt:" + (whole == dt_cap ? std::to_string(static_cast<long long>(whole))
                                  : std::to_string(dt_cap));
}

EncodingConfig EncodingConfig::parse(const std::string& spec) {
  EncodingConfig cfg;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  try {
    if (kind == "disk") {
      cfg.scheme = EncodingScheme::kDisk;
      if (!arg.empty()) cfg.disk_radius = std::stoi(arg);
    } else if (kind == "dt") {
      cfg.scheme = EncodingScheme::kDistanceTransform;
      if (!arg.empty()) cfg.dt_cap = std::stod(arg);
    } else {
      throw PreconditionError("unknown encoding '" + spec + "'");
    }
  } catch (const std::logic_error&) {
    throw PreconditionError("malformed encoding '" + spec + "'");
  }
  cfg.validate();
  return cfg;
}

BinaryMask click_mask(const ClickList& clicks, Polarity polarity, int height,
                      int width) {
  BinaryMask m(height, width);
  for (const Click& c : clicks) {
    require_in_bounds(c, height, width);
    if (c.polarity == polarity) m.at(c.row, c.col) = 1;
  }
  return m;
}

namespace {

Grid<double> disk_channel(const BinaryMask& centers, int radius) {
  const int h = centers.height();
  const int w = centers.width();
  Grid<double> out(h, w, 0.0);
  const long r2 = static_cast<long>(radius) * radius;
  // Duplicate clicks collapse in `centers`.
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!centers.at(r, c)) continue;
      for (int y = std::max(0, r - radius); y <= std::min(h - 1, r + radius); ++y) {
        for (int x = std::max(0, c - radius); x <= std::min(w - 1, c + radius);
             ++x) {
          const long dy = y - r;
          const long dx = x - c;
          if (dy * dy + dx * dx <= r2) out.at(y, x) = 1.0;
        }
      }
    }
  }
  return out;
}

Grid<double> dt_channel(const BinaryMask& centers, double cap) {
  Grid<double> out(centers.height(), centers.width(), 0.0);
  if (centers.none()) return out;
  const DistanceMap d = distance_transform(centers);
  for (std::size_t i = 0; i < d.size(); ++i) {
    out[i] = 1.0 - std::min(d[i], cap) / cap;
  }
  return out;
}

}  // namespace

GuidanceChannels encode_disks(const ClickList& clicks, int height, int width,
                              int radius) {
  if (radius < 0) throw PreconditionError("disk radius must be >= 0");
  return {
      disk_channel(click_mask(clicks, Polarity::kPositive, height, width), radius),
      disk_channel(click_mask(clicks, Polarity::kNegative, height, width), radius)};
}

GuidanceChannels encode_distance_transform(const ClickList& clicks, int height,
                                           int width, double cap) {
  if (!(cap > 0.0)) throw PreconditionError("dt cap must be > 0");
  return {dt_channel(click_mask(clicks, Polarity::kPositive, height, width), cap),
          dt_channel(click_mask(clicks, Polarity::kNegative, height, width), cap)};
}

GuidanceChannels encode(const ClickList& clicks, int height, int width,
                        const EncodingConfig& cfg) {
  if (cfg.scheme == EncodingScheme::kDisk) {
    return encode_disks(clicks, height, width, cfg.disk_radius);
  }
  return encode_distance_transform(clicks, height, width, cfg.dt_cap);
}

}  // namespace clickseg
