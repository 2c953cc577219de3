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

#include "clickseg/imageproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace clickseg {

namespace {

constexpr double kFar = 1e20;

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), exact squared
// distance for one line. `f` holds 0 at sources and kFar elsewhere.
void edt_1d(const std::vector<double>& f, std::vector<double>& d,
            std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto intersect = [&](int q, int p) {
    return ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
  };
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Squared Euclidean distance to the nearest nonzero pixel of `sources`.
Grid<double> squared_edt(const Grid<std::uint8_t>& sources) {
  const int h = sources.height();
  const int w = sources.width();
  Grid<double> out(h, w, kFar);
  if (h == 0 || w == 0) return out;

  const int n = std::max(h, w);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int c = 0; c < w; ++c) {
    f.resize(h);
    d.resize(h);
    for (int r = 0; r < h; ++r) f[r] = sources.at(r, c) ? 0.0 : kFar;
    edt_1d(f, d, v, z);
    for (int r = 0; r < h; ++r) out.at(r, c) = d[r];
  }
  for (int r = 0; r < h; ++r) {
    f.resize(w);
    d.resize(w);
    for (int c = 0; c < w; ++c) f[c] = out.at(r, c);
    edt_1d(f, d, v, z);
    for (int c = 0; c < w; ++c) out.at(r, c) = d[c];
  }
  return out;
}

}  // namespace

BinaryMask LabeledRegions::region(std::int32_t id) const {
  BinaryMask m(labels.height(), labels.width());
  for (std::size_t i = 0; i < labels.size(); ++i) m[i] = labels[i] == id;
  return m;
}

LabeledRegions connected_components(const BinaryMask& mask,
                                    Connectivity connectivity) {
  const int h = mask.height();
  const int w = mask.width();
  LabeledRegions out;
  out.connectivity = connectivity;
  out.labels = Grid<std::int32_t>(h, w, 0);

  static constexpr int kDr[8] = {-1, 1, 0, 0, -1, -1, 1, 1};
  static constexpr int kDc[8] = {0, 0, -1, 1, -1, 1, -1, 1};
  const int neighbours = connectivity == Connectivity::kEight ? 8 : 4;

  std::deque<std::pair<int, int>> queue;
  std::int32_t next = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c) || out.labels.at(r, c) != 0) continue;
      const std::int32_t id = ++next;
      std::size_t area = 0;
      out.labels.at(r, c) = id;
      queue.emplace_back(r, c);
      while (!queue.empty()) {
        auto [cr, cc] = queue.front();
        queue.pop_front();
        ++area;
        for (int k = 0; k < neighbours; ++k) {
          const int nr = cr + kDr[k];
          const int nc = cc + kDc[k];
          if (!mask.contains(nr, nc) || !mask.at(nr, nc) ||
              out.labels.at(nr, nc) != 0) {
            continue;
          }
          out.labels.at(nr, nc) = id;
          queue.emplace_back(nr, nc);
        }
      }
      out.region_areas.push_back(area);
      out.first_pixel.push_back(mask.index(r, c));
    }
  }
  return out;
}

DistanceMap distance_transform(const BinaryMask& mask) {
  const double cap = static_cast<double>(mask.height() + mask.width());
  DistanceMap out(mask.height(), mask.width(), cap);
  if (mask.none()) return out;
  const Grid<double> sq = squared_edt(mask);
  for (std::size_t i = 0; i < sq.size(); ++i) out[i] = std::sqrt(sq[i]);
  return out;
}

DistanceMap interior_distance(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  DistanceMap out(h, w, 0.0);
  if (mask.none()) return out;

  // Outside set = complement of the mask plus a one-pixel ring around it.
  Grid<std::uint8_t> outside(h + 2, w + 2, 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) outside.at(r + 1, c + 1) = mask.at(r, c) ? 0 : 1;
  }
  const Grid<double> sq = squared_edt(outside);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (mask.at(r, c)) out.at(r, c) = std::sqrt(sq.at(r + 1, c + 1));
    }
  }
  return out;
}

BinaryMask erode(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  BinaryMask out(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      bool keep = true;
      for (int dr = -1; dr <= 1 && keep; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if (!mask.contains(nr, nc) || !mask.at(nr, nc)) {
            keep = false;
            break;
          }
        }
      }
      out.at(r, c) = keep ? 1 : 0;
    }
  }
  return out;
}

QuarterErosion erode_to_quarter_steps(const BinaryMask& mask) {
  const std::size_t original = mask.area();
  if (original == 0) {
    throw PreconditionError("erode_to_quarter requires a nonempty mask");
  }
  QuarterErosion result{mask, 0};
  // area <= original / 4, kept in integers.
  while (4 * result.mask.area() > original) {
    BinaryMask next = erode(result.mask);
    if (next.none()) break;
    result.mask = std::move(next);
    ++result.erosions;
  }
  return result;
}

BinaryMask erode_to_quarter(const BinaryMask& mask) {
  return erode_to_quarter_steps(mask).mask;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  require_same_shape(a, b, "iou");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool x = a[i] != 0;
    const bool y = b[i] != 0;
    inter += (x && y);
    uni += (x || y);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask rasterize_polygon(const std::vector<Point2>& vertices, int height,
                             int width) {
  if (vertices.size() < 3) {
    throw PreconditionError("polygon needs at least 3 vertices, got " +
                            std::to_string(vertices.size()));
  }
  BinaryMask out(height, width);
  const std::size_t n = vertices.size();
  std::vector<double> xs;
  for (int r = 0; r < height; ++r) {
    const double y = r + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = vertices[i];
      const Point2& b = vertices[(i + 1) % n];
      // Half-open in y so shared vertices are counted once.
      if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y)) {
        xs.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Pixel centers with xs[k] <= col + 0.5 < xs[k+1].
      const int c0 = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)));
      const int c1 =
          std::min(width, static_cast<int>(std::ceil(xs[k + 1] - 0.5)));
      for (int c = c0; c < c1; ++c) out.at(r, c) = 1;
    }
  }
  return out;
}

BinaryMask flip_horizontal(const BinaryMask& m) {
  BinaryMask out(m.height(), m.width());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) out.at(r, m.width() - 1 - c) = m.at(r, c);
  }
  return out;
}

BinaryMask flip_vertical(const BinaryMask& m) {
  BinaryMask out(m.height(), m.width());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) out.at(m.height() - 1 - r, c) = m.at(r, c);
  }
  return out;
}

}  // namespace clickseg
