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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trailkit/evalkit.hpp"
#include "trailkit/pipeline.hpp"
#include "trailkit/segnet.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::cli {

/// Every tunable of the toolkit. Defaults are the module defaults; a fully
/// defaulted config reproduces the desk-scale runs.
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  int jobs = 0;  ///< OpenMP thread cap; 0 keeps the runtime default

  sim::DatasetOptions dataset;
  sim::StarFieldParams field;  ///< background star fields (noise model shared)
  int backgrounds = 10;
  int background_size = 2048;
  sim::FieldOptions frames;  ///< field-test frames; star field taken from `field`

  segnet::NetConfig net;
  segnet::TrainConfig train;

  pipeline::DetectOptions detect;
  int grid_rows = 4;
  int grid_cols = 5;
  double grid_overlap = 0.1;

  eval::MatchCriteria criteria;
  std::vector<double> snr_values = {0, 1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30};
  int trials_per_snr = 100;
  std::vector<double> ratios = {0.0, 0.12, 0.14, 0.20, 0.39, 0.78};

  void validate() const;
};

/// JSON document of the config, angles in degrees.
std::string config_to_json(const RunConfig& cfg);

/// Defaults, then the JSON file (if given), then "section.key=value"
/// overrides, where value is parsed as JSON when possible and as a string
/// otherwise. Unknown keys are kConfig errors.
RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides);

/// Stars and noise of the desk backgrounds and field frames.
std::vector<Raster> desk_backgrounds(const RunConfig& cfg);

/// Seed of the field-test frame set; frame i uses derive_seed(seed, i + 1).
std::uint64_t field_frame_seed(const RunConfig& cfg);

struct TrainSummary {
  int first_epoch = 0;
  int last_epoch = 0;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  double final_val_iou = 0.0;
};

/// Desk dataset (frames == 0) or field-test frames (frames > 0) into `dir`.
sim::DatasetManifest cmd_simulate(const RunConfig& cfg, const std::filesystem::path& dir, int frames = 0);

/// Trains on the manifest in data_dir. Writes the best checkpoint to `out`,
/// the latest to `out`.last and appends to `log`. With `resume`, weights and
/// the epoch counter continue from that checkpoint (optimizer moments restart).
TrainSummary cmd_train(const RunConfig& cfg, const std::filesystem::path& data_dir, const std::filesystem::path& out,
                       const std::optional<std::filesystem::path>& resume, const std::filesystem::path& log);

/// Detects every frame and writes one bundle per frame into out_dir. Frames
/// of the network input size are processed as a single tile.
std::vector<pipeline::FrameDetection> cmd_detect(const RunConfig& cfg, const std::filesystem::path& model,
                                                 const std::vector<std::filesystem::path>& frames,
                                                 const std::filesystem::path& out_dir);

/// Image paths of a manifest, resolved against its directory.
std::vector<std::filesystem::path> manifest_images(const std::filesystem::path& manifest);

/// Matches the bundles in detections_dir against the manifest truth at the
/// configured min_length_ratio and writes a one-row table to `out`.
eval::DetectionReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& manifest,
                                   const std::filesystem::path& detections_dir, const std::filesystem::path& out);

eval::SweepCurve cmd_sweep_snr(const RunConfig& cfg, const std::filesystem::path& model,
                               const std::filesystem::path& out_dir);

eval::SweepCurve cmd_sweep_threshold(const RunConfig& cfg, const std::filesystem::path& manifest,
                                     const std::filesystem::path& detections_dir, const std::filesystem::path& out);

/// Runs the command line; returns the process exit code. Errors are printed
/// as "error: <category>: <message>".
int run(int argc, char** argv);

}  // namespace trailkit::cli
