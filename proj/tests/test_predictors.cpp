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

#include <atomic>
#include <cmath>
#include <thread>

#include "clickseg/datasets.hpp"
#include "clickseg/featherweight.hpp"
#include "clickseg/geodesic.hpp"
#include "clickseg/imageproc.hpp"
#include "clickseg/remote.hpp"
#include "clickseg/wire.hpp"
#include "httplib.h"
#include "test_util.hpp"

namespace clickseg {
namespace {

using testing::TestRng;

PredictorInput input_for(ImagePtr img, const ClickList& clicks,
                         std::optional<BinaryMask> prev = std::nullopt) {
  BinaryMask p = prev ? *prev : BinaryMask(img->height(), img->width());
  return make_predictor_input(std::move(img), clicks, std::move(p));
}

std::shared_ptr<RgbImage> square_image(int n, int r0, int r1) {
  auto img = testing::flat_image(n, n, 255);
  for (int r = r0; r <= r1; ++r)
    for (int c = r0; c <= r1; ++c)
      for (int k = 0; k < 3; ++k) img->pixel(r, c)[k] = 0;
  return img;
}

std::shared_ptr<RgbImage> flip_image(const RgbImage& img) {
  auto out = std::make_shared<RgbImage>(img.height(), img.width());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      std::copy_n(img.pixel(r, c), 3, out->pixel(r, img.width() - 1 - c));
  return out;
}

// ---------------------------------------------------------------------------
// Contract
// ---------------------------------------------------------------------------

TEST(Contract, NoGuidanceIsAPreconditionError) {
  const ConstantPredictor constant(0.3);
  EXPECT_THROW(constant.predict(input_for(testing::flat_image(5, 5), {})), PreconditionError);
  // Negative clicks alone are not enough either.
  EXPECT_THROW(constant.predict(input_for(testing::flat_image(5, 5),
                                          {{1, 1, Polarity::kNegative, 0}})),
               PreconditionError);
  // A nonempty previous mask is.
  EXPECT_NO_THROW(constant.predict(
      input_for(testing::flat_image(5, 5), {}, testing::rect_mask(5, 5, 0, 0, 1, 1))));
}

TEST(Contract, ShapeMismatchIsAnError) {
  PredictorInput in = input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}});
  in.prev_mask = BinaryMask(4, 5);
  EXPECT_THROW(ConstantPredictor(0.1).predict(in), ShapeError);
}

class OvershootingPredictor final : public Predictor {
 public:
  std::string name() const override { return "overshoot"; }

 protected:
  ProbMap run(const PredictorInput& input) const override {
    ProbMap p(input.height(), input.width(), 7.0);
    p[0] = -3.0;
    return p;
  }
};

TEST(Contract, OutputIsClampedIntoUnitInterval) {
  const ProbMap p = OvershootingPredictor().predict(
      input_for(testing::flat_image(3, 3), {{1, 1, Polarity::kPositive, 0}}));
  EXPECT_EQ(p[0], 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_EQ(p[i], 1.0);
}

TEST(Oracle, ReturnsGroundTruth) {
  const BinaryMask gt = testing::rect_mask(6, 6, 1, 2, 3, 4);
  const OraclePredictor oracle(gt);
  const ProbMap p = oracle.predict(input_for(testing::flat_image(6, 6), {{0, 0, Polarity::kPositive, 0}}));
  EXPECT_EQ(p, to_prob(gt));
}

TEST(MaskDropping, HidesPreviousMask) {
  // The featherweight model with only a prev_mask weight echoes prev_mask.
  FeatherweightModel echo;
  echo.weights[3] = 40.0;
  echo.weights[0] = -20.0;
  auto inner = std::make_shared<FeatherweightPredictor>(echo);
  const MaskDroppingPredictor dropping(inner);
  const BinaryMask prev = testing::rect_mask(8, 8, 2, 2, 5, 5);
  const auto in = input_for(testing::flat_image(8, 8), {{3, 3, Polarity::kPositive, 0}}, prev);
  EXPECT_EQ(binarize(inner->predict(in)), prev);
  EXPECT_TRUE(binarize(dropping.predict(in)).none());
  EXPECT_EQ(dropping.name(), "featherweight+nomask");
}

// ---------------------------------------------------------------------------
// Geodesic
// ---------------------------------------------------------------------------

TEST(Geodesic, RadiallyDecreasingOnUniformImage) {
  const int n = 41, c0 = 20;
  const GeodesicPredictor geo;
  const ProbMap p = geo.predict(input_for(testing::flat_image(n, n), {{c0, c0, Polarity::kPositive, 0}}));
  EXPECT_GT(p.at(c0, c0), 0.5);
  for (int dr = -1; dr <= 1; ++dr)
    for (int dc = -1; dc <= 1; ++dc) {
      if (dr == 0 && dc == 0) continue;
      for (int k = 1; p.contains(c0 + (k)*dr, c0 + (k)*dc); ++k) {
        ASSERT_LE(p.at(c0 + k * dr, c0 + k * dc), p.at(c0 + (k - 1) * dr, c0 + (k - 1) * dc));
      }
    }
}

TEST(Geodesic, EquidistantPixelIsHalf) {
  const GeodesicPredictor geo;
  const ClickList clicks{{5, 3, Polarity::kPositive, 0}, {5, 13, Polarity::kNegative, 1}};
  const ProbMap p = geo.predict(input_for(testing::flat_image(11, 17), clicks));
  EXPECT_NEAR(p.at(5, 8), 0.5, 1e-6);
}

TEST(Geodesic, SegmentsDarkSquare) {
  const auto img = square_image(64, 20, 43);
  const BinaryMask gt = testing::rect_mask(64, 64, 20, 20, 43, 43);
  const GeodesicPredictor geo;
  const ProbMap p = geo.predict(input_for(img, {{31, 31, Polarity::kPositive, 0}}));
  EXPECT_GE(iou(binarize(p), gt), 0.95);
}

TEST(Geodesic, PositiveClicksAreForeground) {
  TestRng rng(51);
  const GeodesicPredictor geo;
  for (int trial = 0; trial < 20; ++trial) {
    const auto img = testing::random_image(rng, 20, 20);
    ClickList clicks;
    for (int k = 0; k < 3; ++k)
      clicks.push_back({testing::uniform_int(rng, 0, 19), testing::uniform_int(rng, 0, 19),
                        Polarity::kPositive, k});
    const ProbMap p = geo.predict(input_for(img, clicks));
    for (const Click& c : clicks) ASSERT_GT(p.at(c.row, c.col), 0.5);
  }
}

TEST(Geodesic, FlipEquivariant) {
  TestRng rng(52);
  const GeodesicPredictor geo;
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = testing::random_image(rng, 15, 19);
    ClickList clicks = testing::random_clicks(rng, 15, 19, 4);
    clicks.push_back({7, 7, Polarity::kPositive, 4});
    const BinaryMask prev = testing::random_noise_mask(rng, 15, 19, 0.2);
    ClickList mirrored = clicks;
    for (Click& c : mirrored) c.col = 18 - c.col;
    const ProbMap a = geo.predict(input_for(img, clicks, prev));
    const ProbMap b = geo.predict(input_for(flip_image(*img), mirrored, flip_horizontal(prev)));
    for (int r = 0; r < 15; ++r)
      for (int c = 0; c < 19; ++c) ASSERT_NEAR(a.at(r, c), b.at(r, 18 - c), 1e-9);
  }
}

TEST(Geodesic, PrevMaskRaisesProbability) {
  const auto img = testing::flat_image(16, 16);
  const ClickList clicks{{8, 8, Polarity::kPositive, 0}};
  const BinaryMask prev(16, 16, 1);
  const GeodesicPredictor geo;
  const ProbMap without = geo.predict(input_for(img, clicks));
  const ProbMap with = geo.predict(input_for(img, clicks, prev));
  for (std::size_t i = 0; i < with.size(); ++i) ASSERT_GT(with[i], without[i]);
}

TEST(Geodesic, CorrectsExternalMaskWithNegativeClicksOnly) {
  const auto img = testing::flat_image(20, 20);
  const BinaryMask ext = testing::rect_mask(20, 20, 2, 2, 17, 17);
  const GeodesicPredictor geo;
  const ProbMap p = geo.predict(input_for(img, {{4, 4, Polarity::kNegative, 0}}, ext));
  EXPECT_LT(p.at(4, 4), 0.5);
  EXPECT_GT(p.at(15, 15), 0.5);
}

TEST(GeodesicDistance, UniformImageIsChamferDistance) {
  BinaryMask seeds(5, 5);
  seeds.at(0, 0) = 1;
  const Grid<double> d = geodesic_distance(*testing::flat_image(5, 5), seeds, 50.0);
  EXPECT_NEAR(d.at(0, 4), 4.0, 1e-12);
  EXPECT_NEAR(d.at(3, 3), 3.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(d.at(1, 3), 2.0 + std::sqrt(2.0), 1e-12);
}

TEST(GeodesicConfig, Validation) {
  GeodesicConfig cfg;
  cfg.temperature = 0.0;
  EXPECT_ANY_THROW(GeodesicPredictor{cfg});
  cfg = {};
  cfg.beta = -1.0;
  EXPECT_ANY_THROW(GeodesicPredictor{cfg});
}

// ---------------------------------------------------------------------------
// Featherweight
// ---------------------------------------------------------------------------

TEST(Featherweight, ZeroWeightsGiveHalf) {
  const ProbMap p = featherweight_predict(
      FeatherweightModel{}, input_for(testing::flat_image(6, 6), {{2, 2, Polarity::kPositive, 0}}));
  for (double v : p.data()) EXPECT_EQ(v, 0.5);
}

TEST(Featherweight, LargePrevMaskWeightEchoesMask) {
  FeatherweightModel m;
  m.weights[3] = 60.0;
  m.weights[0] = -30.0;
  const BinaryMask prev = testing::rect_mask(9, 9, 1, 1, 4, 6);
  const ProbMap p =
      featherweight_predict(m, input_for(testing::flat_image(9, 9), {}, prev));
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], prev[i], 1e-9);
}

TEST(Featherweight, FeaturesFollowTheSpec) {
  auto img = testing::flat_image(12, 12, 0);
  for (int k = 0; k < 3; ++k) img->pixel(0, 0)[k] = 255;
  const BinaryMask prev = testing::rect_mask(12, 12, 0, 0, 0, 0);
  const auto f = extract_features(input_for(img, {{6, 6, Polarity::kPositive, 0}}, prev));
  const FeatureVector& at_click = f[6 * 12 + 6];
  EXPECT_EQ(at_click[0], 1.0);
  EXPECT_EQ(at_click[1], 0.0);
  EXPECT_EQ(at_click[2], 1.0);  // no negative clicks
  EXPECT_EQ(at_click[4], 0.0);
  EXPECT_EQ(at_click[5], 1.0);
  EXPECT_EQ(at_click[6], 1.0);
  EXPECT_EQ(at_click[7], 0.0);
  const FeatureVector& corner = f[0];
  EXPECT_NEAR(corner[1], std::hypot(6, 6) / kFeatureDistanceCap, 1e-12);
  EXPECT_EQ(corner[3], 1.0);
  EXPECT_NEAR(corner[4], 1.0, 1e-12);  // white vs black click color
  EXPECT_EQ(corner[6], 0.0);
}

TEST(Featherweight, WeightGradientMatchesFiniteDifferences) {
  TestRng rng(53);
  const LossConfig nfl_cfg;
  LossConfig focal_cfg = nfl_cfg;
  focal_cfg.kind = LossKind::kFocal;
  for (int trial = 0; trial < 10; ++trial) {
    const auto img = testing::random_image(rng, 16, 16);
    const BinaryMask target = testing::random_blob(rng, 16, 16);
    ClickList clicks = testing::random_clicks(rng, 16, 16, 4);
    clicks.push_back({8, 8, Polarity::kPositive, 4});
    const auto in = input_for(img, clicks, testing::random_noise_mask(rng, 16, 16, 0.3));
    FeatherweightModel m;
    for (double& w : m.weights) w = testing::uniform_real(rng, -1.5, 1.5);

    const WeightGradient g = loss_and_weight_gradient(m, in, target, nfl_cfg);
    const double P = nfl(featherweight_predict(m, in), target).normalizer;
    const double h = 1e-5;
    for (int k = 0; k < kFeatureCount; ++k) {
      FeatherweightModel up = m, down = m;
      up.weights[k] += h;
      down.weights[k] -= h;
      const double fd = (focal(featherweight_predict(up, in), target, focal_cfg).value -
                         focal(featherweight_predict(down, in), target, focal_cfg).value) /
                        (2.0 * h * P);
      const double scale = std::max({std::abs(fd), std::abs(g.grad[k]), 1e-12});
      EXPECT_LT(std::abs(fd - g.grad[k]) / scale, 1e-3) << "weight " << k;
    }
  }
}

TEST(Featherweight, ModelJsonRoundTrip) {
  FeatherweightModel m;
  for (int k = 0; k < kFeatureCount; ++k) m.weights[k] = 0.1 * k - 0.35;
  EXPECT_EQ(FeatherweightModel::from_json(m.to_json()), m);
  EXPECT_ANY_THROW(FeatherweightModel::from_json(R"({"version":2,"weights":[]})"));
  EXPECT_ANY_THROW(FeatherweightModel::from_json("not json"));
}

class FeatherweightTraining : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    SuiteOptions opts;
    opts.height = opts.width = 64;
    suite_ = new Dataset(make_synthetic_suite(SuiteKind::kTwoColorShapes, 30, 5, opts));
  }
  static void TearDownTestSuite() { delete suite_; }
  static Dataset* suite_;
};
Dataset* FeatherweightTraining::suite_ = nullptr;

TEST_F(FeatherweightTraining, DeterministicForSeed) {
  TrainConfig cfg;
  cfg.epochs = 3;
  Rng a(7), b(7);
  const auto ra = train_featherweight(suite_->instances, cfg, a);
  const auto rb = train_featherweight(suite_->instances, cfg, b);
  EXPECT_EQ(ra.model, rb.model);
  EXPECT_EQ(ra.log.epoch_loss, rb.log.epoch_loss);
}

TEST_F(FeatherweightTraining, LossIsFiniteAndDecreases) {
  TrainConfig cfg;
  cfg.epochs = 6;
  Rng rng(8);
  const auto r = train_featherweight(suite_->instances, cfg, rng);
  ASSERT_EQ(r.log.epoch_loss.size(), 6u);
  for (double v : r.log.epoch_loss) EXPECT_TRUE(std::isfinite(v));
  EXPECT_LE(r.log.epoch_loss.back(), r.log.epoch_loss.front());
  EXPECT_EQ(r.log.steps, 6u * suite_->size());
}

TEST_F(FeatherweightTraining, DivergenceIsReported) {
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.init.weights[0] = std::numeric_limits<double>::infinity();
  Rng rng(0);
  EXPECT_ANY_THROW(train_featherweight(suite_->instances, cfg, rng));
  EXPECT_THROW(train_featherweight({}, TrainConfig{}, rng), PreconditionError);
}

// ---------------------------------------------------------------------------
// Remote
// ---------------------------------------------------------------------------

/// A /predict server on an ephemeral port running `handler` in a thread.
class TestServer {
 public:
  explicit TestServer(httplib::Server::Handler handler) {
    server_.Post("/predict", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST(Remote, EchoServerReturnsPrevMask) {
  TestServer server([](const httplib::Request& req, httplib::Response& res) {
    const PredictorInput in = decode_predict_request(req.body);
    res.set_content(encode_predict_response(to_prob(in.prev_mask)), "application/json");
  });
  TestRng rng(54);
  const BinaryMask prev = testing::random_noise_mask(rng, 13, 7, 0.5);
  const RemotePredictor remote(server.endpoint());
  const ProbMap p = remote.predict(input_for(testing::random_image(rng, 13, 7),
                                             {{1, 1, Polarity::kPositive, 0}}, prev));
  EXPECT_EQ(p, to_prob(prev));
}

TEST(Remote, WireCarriesGuidanceChannels) {
  std::string seen;
  TestServer server([&](const httplib::Request& req, httplib::Response& res) {
    const PredictorInput in = decode_predict_request(req.body);
    res.set_content(encode_predict_response(ProbMap(in.guidance.pos)), "application/json");
  });
  const auto in = input_for(testing::flat_image(20, 20), {{10, 10, Polarity::kPositive, 0}});
  const ProbMap p = RemotePredictor(server.endpoint()).predict(in);
  EXPECT_EQ(p, ProbMap(in.guidance.pos));
}

TEST(Remote, WrongLengthIsAShapeError) {
  TestServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content(encode_predict_response(ProbMap(2, 2, 0.5)), "application/json");
  });
  const RemotePredictor remote(server.endpoint());
  EXPECT_THROW(remote.predict(input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}})),
               ShapeError);
}

TEST(Remote, MalformedResponseIsAProtocolError) {
  TestServer server([](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"nope\": 1}", "application/json");
  });
  const RemotePredictor remote(server.endpoint());
  EXPECT_THROW(remote.predict(input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}})),
               ProtocolError);
}

TEST(Remote, TimeoutNamesEndpointAndElapsedTime) {
  TestServer server([](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content(encode_predict_response(ProbMap(5, 5, 0.5)), "application/json");
  });
  const RemotePredictor remote(server.endpoint(), std::chrono::milliseconds(200));
  try {
    remote.predict(input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}}));
    FAIL() << "expected a transport error";
  } catch (const TransportError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(server.endpoint()), std::string::npos) << msg;
    EXPECT_NE(msg.find(" ms"), std::string::npos) << msg;
  }
}

TEST(Remote, ErrorStatusIsATransportError) {
  TestServer server([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const RemotePredictor remote(server.endpoint());
  EXPECT_THROW(remote.predict(input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}})),
               TransportError);
}

TEST(Remote, UnreachableEndpoint) {
  // Grab a free port, then close it.
  int port = 0;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }
  const RemotePredictor remote("127.0.0.1:" + std::to_string(port), std::chrono::milliseconds(500));
  EXPECT_THROW(remote.predict(input_for(testing::flat_image(5, 5), {{1, 1, Polarity::kPositive, 0}})),
               TransportError);
}

}  // namespace
}  // namespace clickseg
