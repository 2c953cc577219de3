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


#include <gtest/gtest.h>

#include "clickseg/encoding.hpp"
#include "clickseg/imageproc.hpp"
#include "test_util.hpp"

namespace clickseg {
namespace {

using testing::TestRng;

std::size_t count_ones(const Grid<double>& g) {
  return static_cast<std::size_t>(std::count(g.data().begin(), g.data().end(), 1.0));
}

Grid<double> flip_h(const Grid<double>& g) {
  Grid<double> out(g.height(), g.width());
  for (int r = 0; r < g.height(); ++r)
    for (int c = 0; c < g.width(); ++c) out.at(r, g.width() - 1 - c) = g.at(r, c);
  return out;
}

TEST(EncodeDisks, InteriorAndCornerCounts) {
  const ClickList center{{10, 10, Polarity::kPositive, 0}};
  EXPECT_EQ(count_ones(encode_disks(center, 32, 32, 5).pos), 81u);
  const ClickList corner{{0, 0, Polarity::kPositive, 0}};
  EXPECT_EQ(count_ones(encode_disks(corner, 32, 32, 5).pos), 26u);
}

TEST(EncodeDisks, EmptyClickListGivesZeroChannels) {
  const auto g = encode_disks({}, 6, 6, 3);
  EXPECT_EQ(count_ones(g.pos) + count_ones(g.neg), 0u);
}

TEST(EncodeDisks, RadiusZeroMarksOnlyTheClick) {
  const ClickList clicks{{2, 3, Polarity::kNegative, 0}};
  const auto g = encode_disks(clicks, 6, 6, 0);
  EXPECT_EQ(count_ones(g.neg), 1u);
  EXPECT_EQ(g.neg.at(2, 3), 1.0);
  EXPECT_EQ(count_ones(g.pos), 0u);
}

TEST(EncodeDisks, MatchesBruteForce) {
  TestRng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const int h = testing::uniform_int(rng, 1, 24);
    const int w = testing::uniform_int(rng, 1, 24);
    const ClickList clicks = testing::random_clicks(rng, h, w, testing::uniform_int(rng, 0, 6));
    for (int radius : {0, 1, 3, 5}) {
      const auto got = encode_disks(clicks, h, w, radius);
      const auto ref = testing::brute_disks(clicks, h, w, radius);
      ASSERT_EQ(got.pos, ref.pos);
      ASSERT_EQ(got.neg, ref.neg);
    }
  }
}

TEST(EncodeDisks, AddingAClickIsLocal) {
  TestRng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    ClickList clicks = testing::random_clicks(rng, 20, 20, 4);
    const auto before = encode_disks(clicks, 20, 20, 4);
    const Click extra{testing::uniform_int(rng, 0, 19), testing::uniform_int(rng, 0, 19),
                      Polarity::kPositive, 4};
    clicks.push_back(extra);
    const auto after = encode_disks(clicks, 20, 20, 4);
    ASSERT_EQ(after.neg, before.neg);
    for (int r = 0; r < 20; ++r)
      for (int c = 0; c < 20; ++c)
        if (after.pos.at(r, c) != before.pos.at(r, c)) {
          ASSERT_LE(std::hypot(r - extra.row, c - extra.col), 4.0);
        }
  }
}

TEST(EncodeDistanceTransform, Examples) {
  const ClickList clicks{{0, 0, Polarity::kPositive, 0}};
  const auto g = encode_distance_transform(clicks, 10, 10, 255.0);
  EXPECT_DOUBLE_EQ(g.pos.at(3, 4), 1.0 - 5.0 / 255.0);
  EXPECT_DOUBLE_EQ(g.pos.at(0, 0), 1.0);
  for (double v : g.neg.data()) EXPECT_EQ(v, 0.0);

  const auto clipped = encode_distance_transform(clicks, 10, 10, 4.0);
  EXPECT_EQ(clipped.pos.at(3, 4), 0.0);
  EXPECT_EQ(clipped.pos.at(4, 0), 0.0);
}

TEST(EncodeDistanceTransform, RangeAndOnesAtClicks) {
  TestRng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const ClickList clicks = testing::random_clicks(rng, 15, 12, 5);
    const auto g = encode_distance_transform(clicks, 15, 12, 20.0);
    const BinaryMask pos = click_mask(clicks, Polarity::kPositive, 15, 12);
    for (std::size_t i = 0; i < pos.size(); ++i) {
      ASSERT_GE(g.pos[i], 0.0);
      ASSERT_LE(g.pos[i], 1.0);
      ASSERT_EQ(g.pos[i] == 1.0, pos[i] == 1);
      if (pos.any()) {
        const int r = static_cast<int>(i) / 12, c = static_cast<int>(i) % 12;
        ASSERT_NEAR(g.pos[i], 1.0 - std::min(testing::brute_distance_at(pos, r, c), 20.0) / 20.0,
                    1e-12);
      }
    }
  }
}

TEST(Encode, EquivariantUnderHorizontalFlip) {
  TestRng rng(24);
  for (const char* spec : {"disk:3", "dt:30"}) {
    const EncodingConfig cfg = EncodingConfig::parse(spec);
    for (int trial = 0; trial < 30; ++trial) {
      const ClickList clicks = testing::random_clicks(rng, 11, 17, 4);
      ClickList mirrored = clicks;
      for (Click& c : mirrored) c.col = 16 - c.col;
      const auto a = encode(clicks, 11, 17, cfg);
      const auto b = encode(mirrored, 11, 17, cfg);
      for (std::size_t i = 0; i < a.pos.size(); ++i) {
        ASSERT_NEAR(flip_h(a.pos)[i], b.pos[i], 1e-12);
        ASSERT_NEAR(flip_h(a.neg)[i], b.neg[i], 1e-12);
      }
    }
  }
}

TEST(Encode, DuplicateClicksDoNotChangeChannels) {
  const ClickList once{{4, 4, Polarity::kPositive, 0}};
  const ClickList twice{{4, 4, Polarity::kPositive, 0}, {4, 4, Polarity::kPositive, 1}};
  EXPECT_EQ(encode(once, 9, 9, {}).pos, encode(twice, 9, 9, {}).pos);
}

TEST(Encode, OutOfBoundsClickIsRejected) {
  const ClickList bad{{9, 0, Polarity::kPositive, 0}};
  EXPECT_THROW(encode(bad, 9, 9, {}), ShapeError);
}

TEST(EncodingConfig, ParseRoundTrip) {
  EXPECT_EQ(EncodingConfig::parse("disk:5").to_string(), "disk:5");
  EXPECT_EQ(EncodingConfig::parse("dt:255").to_string(), "dt:255");
  EXPECT_ANY_THROW(EncodingConfig::parse("gauss:3"));
  EXPECT_ANY_THROW(EncodingConfig::parse("disk:-1"));
}

}  // namespace
}  // namespace clickseg
