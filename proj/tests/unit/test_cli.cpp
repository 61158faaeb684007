// Copyright 2026 The trailkit Authors. All Rights Reserved.
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


#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "support.hpp"
#include "trailkit/cli.hpp"
#include "trailkit/error.hpp"

using namespace trailkit;
using namespace trailkit::cli;
using trailkit::testing::TempDir;

namespace {

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "trailkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Small enough to simulate, train and detect in seconds.
std::vector<std::string> small_overrides() {
  return {"simulator.backgrounds=2",   "simulator.background_size=96", "simulator.tile_size=32",
          "segnet.input_size=32",      "segnet.depth=2",               "segnet.base_channels=4",
          "simulator.bins=[1,2]",      "simulator.frame_width=80",     "simulator.frame_height=64",
          "simulator.stars_per_megapixel=2000"};
}

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& more) {
  base.insert(base.end(), more.begin(), more.end());
  return base;
}

}  // namespace

TEST_CASE("defaults mirror the operating point") {
  const RunConfig c = load_config(std::nullopt, {});
  CHECK(c.dataset.count == 375);
  CHECK(c.dataset.split_ratio == 0.8);
  CHECK(c.dataset.snr_low == 2.0);
  CHECK(c.dataset.snr_high == 30.0);
  CHECK(c.dataset.tile_size == 256);
  CHECK(c.train.batch_size == 2);
  CHECK(c.train.learning_rate == 0.01);
  CHECK(c.detect.lsd.min_length_ratio == 0.12);
  CHECK(c.net.depth == 4);
  CHECK(c.net.base_channels == 16);
  CHECK(c.grid_rows == 4);
  CHECK(c.grid_cols == 5);
  CHECK(c.grid_overlap == 0.1);
  CHECK(c.criteria.max_perp_distance == 5.0);
  CHECK(c.trials_per_snr == 100);
  CHECK(c.ratios == std::vector<double>{0.0, 0.12, 0.14, 0.20, 0.39, 0.78});
}

TEST_CASE("every section and tunable is reachable") {
  const auto doc = nlohmann::json::parse(config_to_json(RunConfig{}));
  for (const char* k : {"seed", "output_dir", "jobs"}) CHECK(doc.contains(k));
  const std::pair<const char*, std::vector<const char*>> sections[] = {
      {"simulator", {"count", "snr_min", "snr_max", "snr_weights", "split_ratio", "tile_size", "bins", "psf_fwhm_x",
                     "readout_noise", "quant_var", "frame_width"}},
      {"segnet", {"depth", "base_channels", "batch_size", "learning_rate", "max_epochs", "loss", "augmentation",
                  "patience"}},
      {"linedet", {"grad_threshold", "angle_tolerance_deg", "nfa_epsilon", "min_length_ratio", "scale",
                   "merge_max_angle_deg", "merge_max_offset", "mask_halfwidth"}},
      {"pipeline", {"rows", "cols", "overlap", "batch_size"}},
      {"evalkit", {"max_angle_deg", "max_perp_distance", "min_overlap_fraction", "snr_values", "trials_per_snr",
                   "ratios"}},
  };
  for (const auto& [section, keys] : sections) {
    REQUIRE(doc.contains(section));
    for (const char* k : keys) CHECK_MESSAGE(doc[section].contains(k), section << "." << k);
  }
  CHECK(doc["linedet"]["angle_tolerance_deg"].get<double>() == doctest::Approx(22.5));
  CHECK(doc["segnet"]["loss"] == "bce+dice");
}

TEST_CASE("config file and overrides") {
  TempDir dir;
  std::ofstream(dir / "c.json") << R"({"seed": 7, "linedet": {"min_length_ratio": 0.2}, "segnet": {"loss": "dice"}})";
  RunConfig c = load_config(dir / "c.json", {"evalkit.max_angle_deg=3", "output_dir=runs/a"});
  CHECK(c.seed == 7);
  CHECK(c.dataset.seed == 7);
  CHECK(c.train.seed == 7);
  CHECK(c.detect.lsd.min_length_ratio == 0.2);
  CHECK(c.train.loss == segnet::LossKind::kDice);
  CHECK(c.criteria.max_angle_diff == doctest::Approx(3.0 * linedet::kDegree));
  CHECK(c.output_dir == "runs/a");

  // The printed config loads back to the same document.
  std::ofstream(dir / "round.json") << config_to_json(c);
  CHECK(config_to_json(load_config(dir / "round.json", {})) == config_to_json(c));

  CHECK_THROWS_AS(load_config(std::nullopt, {"simulator.nope=1"}), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {"simulator=1"}), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {"seed"}), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {"simulator.count=\"many\""}), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {"segnet.augmentation=[\"warp\"]"}), Error);
  CHECK_THROWS_AS(load_config(std::nullopt, {"simulator.tile_size=128"}), Error);
  std::ofstream(dir / "bad.json") << R"({"linedet": {"typo": 1}})";
  try {
    load_config(dir / "bad.json", {});
    FAIL("unknown nested key accepted");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kConfig);
    CHECK(std::string(e.what()).find("linedet.typo") != std::string::npos);
  }
  std::ofstream(dir / "broken.json") << "{ seed: ";
  CHECK_THROWS_AS(load_config(dir / "broken.json", {}), Error);
  CHECK_THROWS_AS(load_config(dir / "missing.json", {}), Error);
}

TEST_CASE("exit codes") {
  TempDir dir;
  CHECK(run_args({"config", "--set", "linedet.scale=0.5"}) == 0);
  CHECK(run_args({"config", "--set", "linedet.nope=0.5"}) == 2);
  CHECK(run_args({"config", "--bogus-flag"}) == 2);
  CHECK(run_args({}) == 2);
  CHECK(run_args({"evaluate", "--counts", "1184", "404", "304"}) == 0);
  CHECK(run_args({"evaluate", "--counts", "-1", "0", "0"}) == 2);
  CHECK(run_args({"detect", "--model", (dir / "none.ckpt").string(), "--out", dir.path().string(), "x.fits"}) == 2);
}

TEST_CASE("published table through the command line") {
  TempDir dir;
  REQUIRE(run_args({"evaluate", "--published", "--out", (dir / "t.txt").string()}) == 0);
  const std::string t = slurp(dir / "t.txt");
  for (const char* row : {"0 1372 27559 116 92.20 4.74", "0.12 1184 404 304 79.57 74.56",
                          "0.14 1136 60 352 76.34 94.98", "0.2 994 5 494 66.80 99.50", "0.39 735 2 753 49.40 99.73",
                          "0.78 410 0 1078 27.55 100.00"}) {
    CHECK_MESSAGE(t.find(row) != std::string::npos, row);
  }
}

TEST_CASE("simulate splits and is deterministic") {
  TempDir dir;
  const auto o = with(small_overrides(), {"simulator.count=10"});
  const RunConfig cfg = load_config(std::nullopt, o);
  const auto m = cmd_simulate(cfg, dir / "a");
  CHECK(m.entries.size() == 10);
  CHECK(m.count(sim::Split::kTrain) == 8);
  CHECK(m.count(sim::Split::kValidation) == 2);
  cmd_simulate(cfg, dir / "b");
  CHECK(slurp(dir / "a" / "manifest.txt") == slurp(dir / "b" / "manifest.txt"));
  CHECK(run_args(with({"simulate", "--count", "10", "--out", (dir / "c").string()},
                      {"--set", "simulator.backgrounds=2", "--set", "simulator.background_size=96", "--set",
                       "simulator.tile_size=32", "--set", "segnet.input_size=32", "--set", "simulator.bins=[1,2]"})) ==
        0);
  CHECK(sim::read_manifest(dir / "c" / "manifest.txt").count(sim::Split::kTrain) == 8);

  const auto frames = cmd_simulate(cfg, dir / "frames", 2);
  CHECK(frames.entries.size() == 2);
  CHECK(frames.count(sim::Split::kTest) == 2);
}

TEST_CASE("simulate, train, detect and evaluate end to end") {
  TempDir dir;
  auto o = with(small_overrides(), {"simulator.count=6", "segnet.max_epochs=1", "evalkit.ratios=[0,0.2,0.5]"});

  auto pass = [&](const std::filesystem::path& root) {
    const RunConfig cfg = load_config(std::nullopt, o);
    cmd_simulate(cfg, root / "data");
    const auto s = cmd_train(cfg, root / "data", root / "m.ckpt", std::nullopt, root / "m.log");
    CHECK(s.first_epoch == 1);
    CHECK(s.last_epoch == 1);
    CHECK(std::filesystem::exists(root / "m.ckpt"));
    cmd_simulate(cfg, root / "frames", 2);
    const auto images = manifest_images(root / "frames" / "manifest.txt");
    REQUIRE(images.size() == 2);
    const auto dets = cmd_detect(cfg, root / "m.ckpt", images, root / "det");
    REQUIRE(dets.size() == 2);
    for (const auto& d : dets) {
      CHECK(std::filesystem::exists(root / "det" / (d.frame_id + "_trails.txt")));
      CHECK(std::filesystem::exists(root / "det" / (d.frame_id + "_mask.trsc")));
      const std::string timing = slurp(root / "det" / (d.frame_id + "_timing.txt"));
      CHECK(timing.find("segment ") != std::string::npos);
      CHECK(timing.find("total ") != std::string::npos);
    }
    const auto r = cmd_evaluate(cfg, root / "frames" / "manifest.txt", root / "det", root / "report.txt");
    CHECK(r.tp + r.fn == [&] {
      long n = 0;
      for (const auto& e : sim::read_manifest(root / "frames" / "manifest.txt").entries) n += e.trails.size();
      return n;
    }());
    const auto curve = cmd_sweep_threshold(cfg, root / "frames" / "manifest.txt", root / "det", root / "sweep.txt");
    REQUIRE(curve.points.size() == 3);
    for (std::size_t k = 1; k < 3; ++k) CHECK(curve.points[k].report.fp <= curve.points[k - 1].report.fp);
    CHECK(std::filesystem::exists(root / "report.snr.txt"));
  };
  pass(dir / "one");
  pass(dir / "two");
  for (const char* f : {"report.txt", "report.snr.txt", "sweep.txt", "data/manifest.txt", "frames/manifest.txt"}) {
    CHECK_MESSAGE(slurp(dir / "one" / f) == slurp(dir / "two" / f), f);
  }
  CHECK(slurp(dir / "one" / "m.ckpt") == slurp(dir / "two" / "m.ckpt"));

  // Resuming continues the epoch counter in the log.
  const RunConfig cfg = load_config(std::nullopt, o);
  const auto s = cmd_train(cfg, dir / "one" / "data", dir / "one" / "m2.ckpt", dir / "one" / "m.ckpt",
                           dir / "one" / "m.log");
  CHECK(s.first_epoch == 2);
  CHECK(s.last_epoch == 2);
  const auto log = segnet::read_train_log(dir / "one" / "m.log");
  REQUIRE(log.size() == 2);
  CHECK(log[0].epoch == 1);
  CHECK(log[1].epoch == 2);
}

TEST_CASE("evaluate with no detections reports zero true positives") {
  TempDir dir;
  const auto o = small_overrides();
  const RunConfig cfg = load_config(std::nullopt, o);
  const auto m = cmd_simulate(cfg, dir / "frames", 3);
  std::filesystem::create_directories(dir / "det");
  for (const auto& e : m.entries) {
    const std::string id = std::filesystem::path(e.image_path).stem().string();
    std::ofstream(dir / "det" / (id + "_trails.txt")) << "# halfwidth 5\n";
    std::ofstream(dir / "det" / (id + "_tiles.txt")) << "frame 80 64 32\n";
  }
  const auto r = cmd_evaluate(cfg, dir / "frames" / "manifest.txt", dir / "det", dir / "r.txt");
  CHECK(r.tp == 0);
  CHECK(r.fp == 0);
  long n = 0;
  for (const auto& e : m.entries) n += static_cast<long>(e.trails.size());
  CHECK(r.fn == n);
}
