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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace clickseg {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two rasters that must share spatial dimensions do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Rasters
// ---------------------------------------------------------------------------

/// Dense row-major 2-D field. The building block for masks, probability maps
/// and distance maps.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;
  Grid(int height, int width, T fill = T{})
      : height_(height), width_(width) {
    if (height < 0 || width < 0) {
      throw ShapeError("negative raster dimensions");
    }
    data_.assign(static_cast<std::size_t>(height) * width, fill);
  }
  Grid(int height, int width, std::vector<T> data)
      : height_(height), width_(width), data_(std::move(data)) {
    if (height < 0 || width < 0 ||
        data_.size() != static_cast<std::size_t>(height) * width) {
      throw ShapeError("raster data length does not match " +
                       std::to_string(height) + "x" + std::to_string(width));
    }
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int row, int col) const {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_shape(const Grid<U>& other) const {
    return height_ == other.height() && width_ == other.width();
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<T> data_;
};

/// Per-pixel {0,1} mask.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;
  BinaryMask(const Grid<std::uint8_t>& g) : Grid(g) {}  // NOLINT

  std::size_t area() const;
  bool any() const;
  bool none() const { return !any(); }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Per-pixel probability in [0,1].
class ProbMap : public Grid<double> {
 public:
  using Grid::Grid;
  ProbMap(const Grid<double>& g) : Grid(g) {}  // NOLINT

  /// Throws PreconditionError if any value is non-finite or outside [0,1].
  void validate() const;

  friend bool operator==(const ProbMap&, const ProbMap&) = default;
};

/// Per-pixel non-negative Euclidean distance in pixels.
using DistanceMap = Grid<double>;

/// 8-bit RGB image, row-major, interleaved.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width);
  RgbImage(int height, int width, std::vector<std::uint8_t> rgb);

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(height_) * width_;
  }

  std::uint8_t* pixel(int row, int col) {
    return data_.data() + 3 * (static_cast<std::size_t>(row) * width_ + col);
  }
  const std::uint8_t* pixel(int row, int col) const {
    return data_.data() + 3 * (static_cast<std::size_t>(row) * width_ + col);
  }

  const std::vector<std::uint8_t>& data() const { return data_; }
  std::vector<std::uint8_t>& data() { return data_; }

  template <typename T>
  bool same_shape(const Grid<T>& g) const {
    return height_ == g.height() && width_ == g.width();
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

using ImagePtr = std::shared_ptr<const RgbImage>;

// ---------------------------------------------------------------------------
// Clicks
// ---------------------------------------------------------------------------

enum class Polarity : std::uint8_t { kPositive, kNegative };

const char* to_string(Polarity p);
/// Accepts "positive"/"negative" (also "pos"/"neg"); throws PreconditionError.
Polarity parse_polarity(const std::string& s);

struct Click {
  int row = 0;
  int col = 0;
  Polarity polarity = Polarity::kPositive;
  int order = 0;

  bool positive() const { return polarity == Polarity::kPositive; }
  friend bool operator==(const Click&, const Click&) = default;
};

using ClickList = std::vector<Click>;

/// Throws ShapeError naming the click when it falls outside height x width.
void require_in_bounds(const Click& click, int height, int width);

/// Throws ShapeError with `what` as context when the two rasters differ in
/// spatial dimensions.
template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const std::string& what) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError(what + ": shape mismatch " +
                     std::to_string(a.height()) + "x" +
                     std::to_string(a.width()) + " vs " +
                     std::to_string(b.height()) + "x" +
                     std::to_string(b.width()));
  }
}

/// Output pixel is 1 iff p > threshold (strict).
BinaryMask binarize(const ProbMap& p, double threshold = 0.5);

/// Embeds a mask as a {0,1} probability map.
ProbMap to_prob(const BinaryMask& m);

}  // namespace clickseg
