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

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>

#include "trailkit/cli.hpp"
#include "trailkit/error.hpp"

namespace trailkit::cli {
namespace {

constexpr std::uint64_t kBackgroundStream = 0xB6;
constexpr std::uint64_t kFieldStream = 0xF1E1D;
constexpr std::uint64_t kSweepStream = 0x5E7;

sim::DatasetOptions dataset_options(const RunConfig& cfg) {
  sim::DatasetOptions o = cfg.dataset;
  o.seed = cfg.seed;
  o.noise = cfg.field.noise;
  return o;
}

TileGrid grid_for(const RunConfig& cfg, int w, int h, int tile_size) {
  if (w == tile_size && h == tile_size) return make_tile_grid(w, h, 1, 1, 0.0);
  return make_tile_grid(w, h, cfg.grid_rows, cfg.grid_cols, cfg.grid_overlap);
}

std::string frame_id(const std::filesystem::path& p) { return p.stem().string(); }

double max_scale(const pipeline::FrameDetection& det) {
  double s = 1.0;
  for (const auto& t : det.tile_results) s = std::max(s, pipeline::tile_scale(t.box, det.tile_size));
  return s;
}

std::vector<sim::TrailSpec> truth_of(const sim::DatasetEntry& e) {
  std::vector<sim::TrailSpec> out;
  for (const auto& t : e.trails) out.push_back(t.spec);
  return out;
}

}  // namespace

std::vector<Raster> desk_backgrounds(const RunConfig& cfg) {
  return sim::make_backgrounds(cfg.backgrounds, cfg.background_size, cfg.background_size, cfg.field,
                               sim::derive_seed(cfg.seed, kBackgroundStream));
}

std::uint64_t field_frame_seed(const RunConfig& cfg) { return sim::derive_seed(cfg.seed, kFieldStream); }

sim::DatasetManifest cmd_simulate(const RunConfig& cfg, const std::filesystem::path& dir, int frames) {
  require(frames >= 0, "frame count must be >= 0");
  sim::GeneratedDataset ds;
  if (frames > 0) {
    sim::FieldOptions fo = cfg.frames;
    fo.field = cfg.field;
    fo.snr_low = cfg.dataset.snr_low;
    fo.snr_high = cfg.dataset.snr_high;
    fo.snr_weights = cfg.dataset.snr_weights;
    ds = sim::generate_field_set(fo, frames, field_frame_seed(cfg));
  } else {
    const auto backgrounds = desk_backgrounds(cfg);
    ds = sim::generate_dataset(backgrounds, dataset_options(cfg));
  }
  sim::write_dataset(ds, dir);
  return ds.manifest;
}

TrainSummary cmd_train(const RunConfig& cfg, const std::filesystem::path& data_dir, const std::filesystem::path& out,
                       const std::optional<std::filesystem::path>& resume, const std::filesystem::path& log) {
  const auto manifest = sim::read_manifest(data_dir / "manifest.txt");
  segnet::TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  segnet::NetworkParams net;
  if (resume) {
    int epoch = 0;
    net = segnet::load_checkpoint(*resume, &epoch);
    tc.first_epoch = epoch + 1;
  } else {
    net = segnet::build_network(cfg.net);
  }
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  std::filesystem::path last = out;
  last += ".last";

  TrainSummary summary;
  summary.first_epoch = tc.first_epoch;
  summary.best_val_loss = std::numeric_limits<double>::infinity();
  auto on_epoch = [&](const segnet::TrainRecord& r, const segnet::NetworkParams& params) {
    segnet::append_train_log(log, r);
    segnet::save_checkpoint(params, r.epoch, last);
    if (r.val_loss < summary.best_val_loss) {
      summary.best_val_loss = r.val_loss;
      summary.best_epoch = r.epoch;
      segnet::save_checkpoint(params, r.epoch, out);
    }
    summary.last_epoch = r.epoch;
    summary.final_val_iou = r.val_iou;
    std::printf("%s\n", segnet::format_train_record(r).c_str());
    std::fflush(stdout);
  };
  segnet::train(net, manifest, data_dir, tc, on_epoch);
  return summary;
}

std::vector<pipeline::FrameDetection> cmd_detect(const RunConfig& cfg, const std::filesystem::path& model,
                                                 const std::vector<std::filesystem::path>& frames,
                                                 const std::filesystem::path& out_dir) {
  const segnet::NetworkParams net = segnet::load_checkpoint(model);
  std::vector<pipeline::FrameDetection> out;
  for (const auto& path : frames) {
    const Raster frame = load_raster(path, format_from_extension(path));
    const TileGrid grid = grid_for(cfg, frame.width(), frame.height(), net.config.input_size);
    pipeline::FrameDetection det = pipeline::detect_frame(frame, net, grid, cfg.detect, frame_id(path));
    pipeline::write_bundle(det, out_dir);
    det.mask = BinaryMask();
    out.push_back(std::move(det));
  }
  return out;
}

std::vector<std::filesystem::path> manifest_images(const std::filesystem::path& manifest) {
  const auto m = sim::read_manifest(manifest);
  std::vector<std::filesystem::path> out;
  for (const auto& e : m.entries) out.push_back(manifest.parent_path() / e.image_path);
  return out;
}

eval::DetectionReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& manifest,
                                   const std::filesystem::path& detections_dir, const std::filesystem::path& out) {
  const auto m = sim::read_manifest(manifest);
  const std::size_t n_bins = cfg.dataset.snr_weights.size();
  const double bin_width = (cfg.dataset.snr_high - cfg.dataset.snr_low) / static_cast<double>(n_bins);
  std::vector<long> bin_found(n_bins, 0), bin_total(n_bins, 0);
  long tp = 0, fp = 0, fn = 0;
  for (const auto& e : m.entries) {
    const std::string id = frame_id(e.image_path);
    const auto trails = pipeline::read_trails(detections_dir / (id + "_trails.txt"));
    const auto tiles = pipeline::read_tile_results(detections_dir / (id + "_tiles.txt"));
    const auto truth = truth_of(e);
    const auto r = eval::match_trails(trails, truth, cfg.criteria.scaled(max_scale(tiles)));
    tp += r.tp;
    fp += r.fp;
    fn += r.fn;
    std::vector<bool> found(truth.size(), false);
    for (const auto& [d, t] : r.assignment) found[static_cast<std::size_t>(t)] = true;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      const double snr = e.trails[k].realized_snr;
      const auto b = static_cast<std::size_t>(
          std::clamp((snr - cfg.dataset.snr_low) / bin_width, 0.0, static_cast<double>(n_bins) - 1.0));
      ++bin_total[b];
      bin_found[b] += found[k] ? 1 : 0;
    }
  }
  const eval::DetectionReport report = eval::compute_report(tp, fp, fn);
  eval::SweepCurve table{eval::SweepAxis::kMinLengthRatio, {}};
  eval::SweepPoint row;
  row.value = cfg.detect.lsd.min_length_ratio;
  row.report = report;
  row.trials = static_cast<long>(m.entries.size());
  table.points.push_back(row);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  eval::write_table(out, table);

  eval::SweepCurve curve{eval::SweepAxis::kSnr, {}};
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (bin_total[b] == 0) continue;
    eval::SweepPoint p;
    p.value = cfg.dataset.snr_low + (b + 0.5) * bin_width;
    p.trials = bin_total[b];
    p.detected = bin_found[b];
    curve.points.push_back(p);
  }
  std::filesystem::path curve_path = out;
  curve_path.replace_extension(".snr.txt");
  eval::write_rate_curve(curve_path, curve);
  return report;
}

eval::SweepCurve cmd_sweep_snr(const RunConfig& cfg, const std::filesystem::path& model,
                               const std::filesystem::path& out_dir) {
  const segnet::NetworkParams net = segnet::load_checkpoint(model);
  eval::SnrSweepOptions o;
  o.tile_size = net.config.input_size;
  o.field = cfg.field;
  o.criteria = cfg.criteria;
  o.detect = cfg.detect;
  const auto curve = eval::snr_sweep(net, cfg.snr_values, cfg.trials_per_snr,
                                     sim::derive_seed(cfg.seed, kSweepStream), o);
  std::filesystem::create_directories(out_dir);
  eval::write_rate_curve(out_dir / "snr_curve.txt", curve);
  eval::write_table(out_dir / "snr_table.txt", curve);
  return curve;
}

eval::SweepCurve cmd_sweep_threshold(const RunConfig& cfg, const std::filesystem::path& manifest,
                                     const std::filesystem::path& detections_dir, const std::filesystem::path& out) {
  const auto m = sim::read_manifest(manifest);
  std::vector<pipeline::FrameDetection> frames;
  std::vector<std::vector<sim::TrailSpec>> truth;
  for (const auto& e : m.entries) {
    frames.push_back(pipeline::read_tile_results(detections_dir / (frame_id(e.image_path) + "_tiles.txt")));
    truth.push_back(truth_of(e));
  }
  const auto curve = eval::frame_threshold_sweep(frames, truth, cfg.ratios, cfg.criteria, cfg.detect);
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  eval::write_table(out, curve);
  return curve;
}

}  // namespace trailkit::cli
