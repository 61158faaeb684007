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

#include <omp.h>

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "trailkit/cli.hpp"
#include "trailkit/error.hpp"

namespace trailkit::cli {
namespace {

void print_report(const eval::DetectionReport& r) {
  std::printf("tp %ld fp %ld fn %ld recall %s precision %s\n", r.tp, r.fp, r.fn, eval::format_percent(r.recall).c_str(),
              eval::format_percent(r.precision).c_str());
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Satellite trail simulation, detection and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::vector<std::string> overrides;
  int jobs = -1;
  long long seed = -1;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_option("--set", overrides, "override, section.key=value (repeatable)");
  app.add_option("-j,--jobs", jobs, "worker thread cap")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed, "global seed")->check(CLI::NonNegativeNumber);

  auto* show = app.add_subcommand("config", "print the resolved configuration as JSON");

  auto* simulate = app.add_subcommand("simulate", "generate a labelled dataset");
  int count = -1, frames = 0;
  double snr_min = -1.0, snr_max = -1.0;
  std::string sim_out;
  simulate->add_option("--count", count, "number of tiles");
  simulate->add_option("--snr-min", snr_min, "lowest target SNR");
  simulate->add_option("--snr-max", snr_max, "highest target SNR");
  simulate->add_option("--frames", frames, "write this many full field-test frames instead of tiles");
  simulate->add_option("--out", sim_out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train the segmentation network");
  std::string data_dir, model_out, resume, log_path;
  int epochs = -1;
  train->add_option("--data", data_dir, "dataset directory (with manifest.txt)")->required();
  train->add_option("--out", model_out, "checkpoint path for the best epoch")->required();
  train->add_option("--resume", resume, "continue from this checkpoint");
  train->add_option("--epochs", epochs, "epochs to run");
  train->add_option("--log", log_path, "training log (default: <out>.log)");

  auto* detect = app.add_subcommand("detect", "detect trails in frames");
  std::string model, manifest, det_out;
  std::vector<std::string> frame_paths;
  detect->add_option("--model", model, "checkpoint")->required();
  detect->add_option("--manifest", manifest, "detect every image of this manifest");
  detect->add_option("--out", det_out, "bundle directory")->required();
  detect->add_option("frames", frame_paths, "frame files");

  auto* evaluate = app.add_subcommand("evaluate", "match detections against truth");
  std::string detections, report_out;
  std::vector<long> counts;
  bool published = false;
  evaluate->add_option("--manifest", manifest, "truth manifest");
  evaluate->add_option("--detections", detections, "bundle directory");
  evaluate->add_option("--out", report_out, "report table path");
  evaluate->add_option("--counts", counts, "report for explicit TP FP FN")->expected(3);
  evaluate->add_flag("--published", published, "recompute the published threshold table");

  auto* sweep_snr = app.add_subcommand("sweep-snr", "detection rate versus SNR");
  std::string sweep_out;
  sweep_snr->add_option("--model", model, "checkpoint")->required();
  sweep_snr->add_option("--out", sweep_out, "output directory")->required();

  auto* sweep_thr = app.add_subcommand("sweep-threshold", "recall and precision versus min-length ratio");
  sweep_thr->add_option("--manifest", manifest, "truth manifest")->required();
  sweep_thr->add_option("--detections", detections, "bundle directory")->required();
  sweep_thr->add_option("--out", report_out, "table path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: config: %s\n", e.what());
    return 2;
  }

  try {
    if (seed >= 0) overrides.push_back("seed=" + std::to_string(seed));
    if (jobs >= 0) overrides.push_back("jobs=" + std::to_string(jobs));
    if (count >= 0) overrides.push_back("simulator.count=" + std::to_string(count));
    if (snr_min >= 0.0) overrides.push_back("simulator.snr_min=" + std::to_string(snr_min));
    if (snr_max >= 0.0) overrides.push_back("simulator.snr_max=" + std::to_string(snr_max));
    if (epochs >= 0) overrides.push_back("segnet.max_epochs=" + std::to_string(epochs));
    const RunConfig cfg =
        load_config(config_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(config_path), overrides);
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);

    if (*show) {
      std::cout << config_to_json(cfg);
    } else if (*simulate) {
      const auto m = cmd_simulate(cfg, sim_out, frames);
      std::printf("wrote %zu train, %zu validation, %zu test entries to %s\n", m.count(sim::Split::kTrain),
                  m.count(sim::Split::kValidation), m.count(sim::Split::kTest), sim_out.c_str());
    } else if (*train) {
      const std::filesystem::path log =
          log_path.empty() ? std::filesystem::path(model_out + ".log") : std::filesystem::path(log_path);
      const auto s = cmd_train(cfg, data_dir, model_out,
                               resume.empty() ? std::nullopt : std::optional<std::filesystem::path>(resume), log);
      std::printf("epochs %d-%d, best epoch %d (val loss %.6g), final val IoU %.4f\n", s.first_epoch, s.last_epoch,
                  s.best_epoch, s.best_val_loss, s.final_val_iou);
    } else if (*detect) {
      std::vector<std::filesystem::path> paths(frame_paths.begin(), frame_paths.end());
      if (!manifest.empty()) {
        const auto more = manifest_images(manifest);
        paths.insert(paths.end(), more.begin(), more.end());
      }
      require(!paths.empty(), "detect needs frame files or --manifest");
      const auto dets = cmd_detect(cfg, model, paths, det_out);
      for (const auto& d : dets) {
        double total = 0.0;
        for (const auto& [stage, s] : d.timing) {
          if (stage == "total") total = s;
        }
        std::printf("%s: %zu trails, %.3f s\n", d.frame_id.c_str(), d.merged_trails.size(), total);
      }
    } else if (*evaluate) {
      if (published) {
        eval::SweepCurve table{eval::SweepAxis::kMinLengthRatio, {}};
        for (const auto& row : eval::published_threshold_table()) {
          eval::SweepPoint p;
          p.value = row.ratio;
          p.report = eval::compute_report(row.tp, row.fp, row.fn);
          table.points.push_back(p);
        }
        if (report_out.empty()) {
          eval::write_table(std::cout, table);
        } else {
          eval::write_table(report_out, table);
        }
      } else if (!counts.empty()) {
        print_report(eval::compute_report(counts[0], counts[1], counts[2]));
      } else {
        require(!manifest.empty() && !detections.empty() && !report_out.empty(),
                "evaluate needs --manifest, --detections and --out (or --counts / --published)");
        print_report(cmd_evaluate(cfg, manifest, detections, report_out));
      }
    } else if (*sweep_snr) {
      const auto curve = cmd_sweep_snr(cfg, model, sweep_out);
      eval::write_rate_curve(std::cout, curve);
    } else if (*sweep_thr) {
      const auto curve = cmd_sweep_threshold(cfg, manifest, detections, report_out);
      eval::write_table(std::cout, curve);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", std::string(to_string(e.category())).c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: internal: %s\n", e.what());
    return 3;
  }
  return 0;
}

}  // namespace trailkit::cli
