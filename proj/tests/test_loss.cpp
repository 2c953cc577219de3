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

#include <cmath>

#include "clickseg/loss.hpp"
#include "fd_oracle.hpp"
#include "test_util.hpp"

namespace clickseg {
namespace {

using testing::TestRng;

ProbMap random_pred(TestRng& rng, int h, int w) {
  ProbMap p(h, w);
  for (auto& v : p.data()) v = testing::uniform_real(rng, 0.05, 0.95);
  return p;
}

LossConfig config(LossKind kind, double gamma = 2.0) {
  LossConfig cfg;
  cfg.kind = kind;
  cfg.gamma = gamma;
  return cfg;
}

TEST(Bce, SinglePixelHalf) {
  EXPECT_NEAR(bce(ProbMap(1, 1, 0.5), BinaryMask(1, 1, 1)).value, std::log(2.0), 1e-15);
}

TEST(Bce, PerfectPredictionIsNearZero) {
  const BinaryMask t = testing::rect_mask(4, 4, 0, 0, 1, 3);
  EXPECT_LT(bce(to_prob(t), t).value, 1e-9);
}

TEST(Focal, SinglePixelHalf) {
  EXPECT_NEAR(focal(ProbMap(1, 1, 0.5), BinaryMask(1, 1, 1)).value, 0.25 * std::log(2.0), 1e-15);
}

TEST(Focal, ConfidentPixelTermVanishes) {
  EXPECT_LT(focal(ProbMap(1, 1, 1.0 - 1e-6), BinaryMask(1, 1, 1)).value, 1e-17);
}

TEST(Focal, GammaZeroIsBce) {
  TestRng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const ProbMap p = random_pred(rng, 8, 8);
    const BinaryMask t = testing::random_noise_mask(rng, 8, 8, 0.5);
    const LossResult a = focal(p, t, config(LossKind::kFocal, 0.0));
    const LossResult b = bce(p, t);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.grad, b.grad);
  }
}

TEST(Nfl, UniformHalfIsLn2ForAnySize) {
  for (int n : {1, 16, 256}) {
    const LossResult r = nfl(ProbMap(1, n, 0.5), BinaryMask(1, n, 1));
    EXPECT_NEAR(r.value, std::log(2.0), 1e-9) << n;
  }
}

TEST(Nfl, NormalizedWeightsSumToOne) {
  TestRng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const ProbMap p = random_pred(rng, 10, 10);
    const BinaryMask t = testing::random_noise_mask(rng, 10, 10, 0.5);
    const LossResult r = nfl(p, t);
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double q = t[i] ? 1.0 - p[i] : p[i];
      total += q * q;
    }
    EXPECT_NEAR(total, r.normalizer, 1e-12 * total);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double q = t[i] ? 1.0 - p[i] : p[i];
      sum += q * q / r.normalizer;
    }
    EXPECT_LT(std::abs(sum - 1.0), 1e-9);
  }
}

TEST(Nfl, PerfectPredictionStaysFinite) {
  const BinaryMask t = testing::rect_mask(4, 4, 0, 0, 1, 3);
  const LossResult r = nfl(to_prob(t), t);
  EXPECT_TRUE(std::isfinite(r.value));
  EXPECT_NEAR(r.value, 1e-12, 1e-13);
}

TEST(Nfl, UnderflowingNormalizerIsAnError) {
  LossConfig cfg;
  cfg.gamma = 40.0;  // (1e-12)^40 underflows
  const BinaryMask t(2, 2, 1);
  EXPECT_THROW(nfl(to_prob(t), t, cfg), DegenerateNormalizerError);
}

TEST(SoftIou, Examples) {
  const BinaryMask t = testing::rect_mask(5, 5, 1, 1, 3, 3);
  EXPECT_NEAR(soft_iou(to_prob(t), t).value, 0.0, 1e-15);
  EXPECT_NEAR(soft_iou(ProbMap(5, 5, 0.0), t).value, 1.0, 1e-15);
  EXPECT_THROW(soft_iou(ProbMap(5, 5, 0.0), BinaryMask(5, 5)), PreconditionError);
  EXPECT_NEAR(soft_iou(ProbMap(5, 5, 0.3), BinaryMask(5, 5)).value, 1.0, 1e-15);
}

TEST(Losses, ShapeMismatch) {
  for (LossKind k : {LossKind::kBce, LossKind::kFocal, LossKind::kNfl, LossKind::kSoftIou}) {
    EXPECT_THROW(compute_loss(ProbMap(2, 2, 0.5), BinaryMask(2, 3, 1), config(k)), ShapeError);
  }
}

class GradientCheck : public ::testing::TestWithParam<LossKind> {};

TEST_P(GradientCheck, MatchesCentralDifferences) {
  TestRng rng(43 + static_cast<int>(GetParam()));
  for (int trial = 0; trial < 10; ++trial) {
    const ProbMap p = random_pred(rng, 16, 16);
    const BinaryMask t = testing::random_noise_mask(rng, 16, 16, 0.5);
    EXPECT_LT(testing::max_gradient_rel_error(p, t, config(GetParam())), 1e-4);
  }
}

INSTANTIATE_TEST_SUITE_P(AllLosses, GradientCheck,
                         ::testing::Values(LossKind::kBce, LossKind::kFocal, LossKind::kNfl,
                                           LossKind::kSoftIou),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(LossConfig, ParseKind) {
  EXPECT_EQ(LossConfig::parse_kind("nfl"), LossKind::kNfl);
  EXPECT_EQ(LossConfig::parse_kind("soft_iou"), LossKind::kSoftIou);
  EXPECT_ANY_THROW(LossConfig::parse_kind("dice"));
}

}  // namespace
}  // namespace clickseg
