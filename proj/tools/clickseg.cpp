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

// clickseg command line: synth, merge, simulate, eval, train, serve.

#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "clickseg/datasets.hpp"
#include "clickseg/eval.hpp"
#include "clickseg/featherweight.hpp"
#include "clickseg/sampling.hpp"
#include "clickseg/service.hpp"
#include "clickseg/wire.hpp"
#include "httplib.h"
#include "json.hpp"

namespace {

using namespace clickseg;
using json = nlohmann::json;

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

// The oracle needs each instance's ground truth; everything else is built
// once and shared.
PredictorSource predictor_source(const std::string& spec) {
  const PredictorRegistry registry = PredictorRegistry::with_defaults();
  if (spec.rfind("oracle", 0) == 0) {
    return [registry, spec](const BinaryMask& gt) { return registry.resolve(spec, gt); };
  }
  return fixed_predictor(registry.resolve(spec));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

struct SynthArgs {
  std::string kind = "two_color_shapes";
  int n = 100;
  std::uint64_t seed = 7;
  int height = 96;
  int width = 96;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  SuiteOptions opts;
  opts.height = a.height;
  opts.width = a.width;
  const Dataset ds = make_synthetic_suite(parse_suite_kind(a.kind), a.n, a.seed, opts);
  save_dataset(ds, a.out);
  spdlog::info("wrote {} instances to {}", ds.size(), a.out);
  return 0;
}

struct MergeArgs {
  std::string general;
  std::string fine;
  double iou = 0.8;
  std::string out;
};

int run_merge(const MergeArgs& a) {
  MergeConfig cfg;
  cfg.iou_threshold = a.iou;
  const Dataset merged = merge_datasets(load_dataset(a.general), load_dataset(a.fine), cfg);
  save_dataset(merged, a.out);
  spdlog::info("merged dataset has {} instances", merged.size());
  return 0;
}

struct SimulateArgs {
  std::string dataset;
  std::string predictor = "geodesic";
  std::uint64_t seed = 0;
  int n_iters_max = 3;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const PredictorSource source = predictor_source(a.predictor);
  SamplingConfig cfg;
  cfg.n_iters_max = a.n_iters_max;
  cfg.rng_seed = a.seed;
  cfg.validate();
  Rng rng(a.seed);

  std::ofstream out(a.out);
  if (!out) throw std::runtime_error("cannot write " + a.out);
  for (const InstanceRecord& rec : ds.instances) {
    const PredictorPtr predictor = source(rec.mask);
    const TrainingInteraction t =
        generate_training_interaction(rec.mask, rec.image, *predictor, cfg, rng);
    json clicks = json::array();
    for (const Click& c : t.clicks) {
      clicks.push_back({{"row", c.row},
                        {"col", c.col},
                        {"polarity", to_string(c.polarity)},
                        {"order", c.order}});
    }
    out << json{{"instance_id", rec.instance_id},
                {"clicks", clicks},
                {"prev_mask", rle_encode(t.prev_mask)}}
               .dump()
        << '\n';
  }
  spdlog::info("wrote {} interaction records to {}", ds.size(), a.out);
  return 0;
}

struct EvalArgs {
  std::string dataset;
  std::string predictor = "geodesic";
  std::string thresholds = "0.85,0.90";
  int max_clicks = 20;
  std::string encoding = "disk:5";
  bool no_prev_mask = false;
  int jobs = 1;
  std::string out;
  std::string csv;
};

int run_eval(const EvalArgs& a) {
  EvalConfig cfg;
  cfg.iou_thresholds = parse_thresholds(a.thresholds);
  cfg.max_clicks = a.max_clicks;
  cfg.encoding = EncodingConfig::parse(a.encoding);
  cfg.disable_prev_mask = a.no_prev_mask;
  cfg.jobs = a.jobs;
  cfg.validate();

  const Dataset ds = load_dataset(a.dataset);
  const EvalReport report = run_noc(ds.instances, predictor_source(a.predictor), cfg, a.predictor);
  write_text(a.out, report.to_json());
  if (!a.csv.empty()) write_text(a.csv, report.to_csv());
  for (const auto& [key, noc] : report.aggregates.noc) {
    std::cout << "NoC@" << key << " = " << noc << "  (>=20: " << report.aggregates.ge20.at(key)
              << ")\n";
  }
  return 0;
}

struct TrainArgs {
  std::string dataset;
  std::uint64_t seed = 0;
  int epochs = TrainConfig{}.epochs;
  double lr = TrainConfig{}.learning_rate;
  int n_iters_max = 3;
  std::string loss = "nfl";
  double gamma = 2.0;
  std::string encoding = "disk:5";
  std::string out;
};

int run_train(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.learning_rate = a.lr;
  cfg.sampling.n_iters_max = a.n_iters_max;
  cfg.sampling.rng_seed = a.seed;
  cfg.loss.kind = LossConfig::parse_kind(a.loss);
  cfg.loss.gamma = a.gamma;
  cfg.encoding = EncodingConfig::parse(a.encoding);

  const Dataset ds = load_dataset(a.dataset);
  Rng rng(a.seed);
  const TrainResult result = train_featherweight(ds.instances, cfg, rng);
  for (std::size_t e = 0; e < result.log.epoch_loss.size(); ++e) {
    spdlog::info("epoch {}: mean loss {:.6f}", e + 1, result.log.epoch_loss[e]);
  }
  result.model.save(a.out);
  spdlog::info("saved model to {}", a.out);
  return 0;
}

struct ServeArgs {
  std::string host = "0.0.0.0";
  int port = 8911;
  std::string predictor = "geodesic";
  std::string static_dir;
  std::string snapshot;
};

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

int run_serve(const ServeArgs& a) {
  ServiceConfig cfg;
  cfg.default_predictor = a.predictor;
  cfg.max_sessions = ServiceConfig::max_sessions_from_env();
  // Fail at startup rather than on the first session.
  PredictorRegistry::with_defaults().resolve(a.predictor, BinaryMask(1, 1));

  SessionService service(cfg);
  httplib::Server server;
  service.mount(server);
  if (!a.static_dir.empty() && !server.set_mount_point("/", a.static_dir)) {
    throw std::runtime_error("static dir not found: " + a.static_dir);
  }
  g_server = &server;
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  spdlog::info("listening on {}:{} (predictor {}, max {} sessions)", a.host, a.port,
               a.predictor, cfg.max_sessions);
  if (!server.listen(a.host, a.port)) throw std::runtime_error("cannot listen");
  if (!a.snapshot.empty()) {
    write_text(a.snapshot, service.snapshot_json());
    spdlog::info("wrote session snapshot to {}", a.snapshot);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clickseg: click-based interactive segmentation toolkit"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset");
  s->add_option("--kind", synth.kind, "two_color_shapes | textured_shapes");
  s->add_option("--n", synth.n, "Number of instances")->check(CLI::PositiveNumber);
  s->add_option("--seed", synth.seed, "RNG seed");
  s->add_option("--height", synth.height)->check(CLI::PositiveNumber);
  s->add_option("--width", synth.width)->check(CLI::PositiveNumber);
  s->add_option("--out", synth.out, "Output dataset directory")->required();

  MergeArgs merge;
  auto* m = app.add_subcommand("merge", "Merge a general and a fine-grained dataset");
  m->add_option("--general", merge.general)->required();
  m->add_option("--fine", merge.fine)->required();
  m->add_option("--iou", merge.iou, "Drop general masks overlapping a fine one above this IoU");
  m->add_option("--out", merge.out)->required();

  SimulateArgs sim;
  auto* si = app.add_subcommand("simulate", "Sample training interactions per instance");
  si->add_option("--dataset", sim.dataset)->required();
  si->add_option("--predictor", sim.predictor);
  si->add_option("--seed", sim.seed);
  si->add_option("--n-iters-max", sim.n_iters_max)->check(CLI::NonNegativeNumber);
  si->add_option("--out", sim.out, "JSON lines output")->required();

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Number-of-clicks evaluation");
  e->add_option("--dataset", ev.dataset)->required();
  e->add_option("--predictor", ev.predictor,
                "oracle | geodesic | featherweight:FILE | remote:URL | constant:V");
  e->add_option("--iou-thr", ev.thresholds, "Comma-separated IoU thresholds");
  e->add_option("--max-clicks", ev.max_clicks)->check(CLI::PositiveNumber);
  e->add_option("--encoding", ev.encoding, "disk:R or dt:CAP");
  e->add_flag("--no-prev-mask", ev.no_prev_mask, "Feed an empty previous mask every step");
  e->add_option("--jobs", ev.jobs)->check(CLI::PositiveNumber);
  e->add_option("--out", ev.out, "JSON report")->required();
  e->add_option("--csv", ev.csv, "Per-instance CSV");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train the featherweight predictor");
  t->add_option("--dataset", tr.dataset)->required();
  t->add_option("--seed", tr.seed);
  t->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber);
  t->add_option("--lr", tr.lr);
  t->add_option("--n-iters-max", tr.n_iters_max)->check(CLI::NonNegativeNumber);
  t->add_option("--loss", tr.loss, "bce | focal | nfl | soft_iou");
  t->add_option("--gamma", tr.gamma);
  t->add_option("--encoding", tr.encoding);
  t->add_option("--out", tr.out, "Model JSON")->required();

  ServeArgs sv;
  auto* srv = app.add_subcommand("serve", "Run the annotation service");
  srv->add_option("--host", sv.host);
  srv->add_option("--port", sv.port)->check(CLI::Range(1, 65535));
  srv->add_option("--predictor", sv.predictor, "Default predictor for new sessions");
  srv->add_option("--static-dir", sv.static_dir, "Serve a built UI from this directory");
  srv->add_option("--snapshot", sv.snapshot, "Write all sessions here on shutdown");

  CLI11_PARSE(app, argc, argv);
  if (verbose) spdlog::set_level(spdlog::level::debug);

  try {
    if (*s) return run_synth(synth);
    if (*m) return run_merge(merge);
    if (*si) return run_simulate(sim);
    if (*e) return run_eval(ev);
    if (*t) return run_train(tr);
    if (*srv) return run_serve(sv);
  } catch (const std::exception& ex) {
    spdlog::error("{}", ex.what());
    return 1;
  }
  return 0;
}
