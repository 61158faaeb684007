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


// Checks against the trained desk checkpoint; each case is a no-op when the
// checkpoint has not been produced yet.

#include <chrono>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "trailkit/cli.hpp"

using namespace trailkit;

namespace {

const std::filesystem::path kModel = TRAILKIT_DEFAULT_MODEL;

bool have_model() {
  if (std::filesystem::exists(kModel)) return true;
  MESSAGE("skipped: no checkpoint at " << kModel.string());
  return false;
}

const segnet::NetworkParams& model() {
  static const segnet::NetworkParams net = segnet::load_checkpoint(kModel);
  return net;
}

struct Tile {
  Raster image;
  BinaryMask mask;
};

Tile snr_tile(double snr, std::uint64_t seed) {
  const cli::RunConfig cfg;
  const Raster bg = sim::make_star_field(256, 256, cfg.field, sim::derive_seed(seed, 1));
  auto spec = sim::random_trail_geometry(256, 256, cfg.field.psf.fwhm(), sim::derive_seed(seed, 2));
  spec.peak_amplitude = sim::solve_peak_for_snr(snr, spec, cfg.field.noise, bg);
  auto r = sim::render_trail(bg, spec, sim::derive_seed(seed, 3));
  return {std::move(r.image), std::move(r.mask)};
}

Raster flip_x(const Raster& img) {
  Raster out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out(img.width() - 1 - x, y) = img(x, y);
  }
  return out;
}

bool crosses(const TileBox& b, Point2 p, Point2 q) {
  return clip_segment(p, q, Rect{static_cast<double>(b.x0), static_cast<double>(b.y0), static_cast<double>(b.x1),
                                 static_cast<double>(b.y1)})
      .has_value();
}

}  // namespace

TEST_CASE("held-out SNR-20 tiles segment with IoU above 0.5") {
  if (!have_model()) return;
  double sum = 0.0;
  const int n = 10;
  for (int k = 0; k < n; ++k) {
    const Tile t = snr_tile(20.0, 0x7E57 + k);
    const double iou = mask_iou(segnet::binarize(segnet::segment(model(), t.image), 0.5), t.mask);
    CHECK(iou > 0.5);
    sum += iou;
  }
  MESSAGE("mean IoU " << sum / n);
}

TEST_CASE("segmentation commutes with a horizontal flip") {
  if (!have_model()) return;
  for (int k = 0; k < 5; ++k) {
    const Tile t = snr_tile(10.0, 0xF11 + k);
    const BinaryMask direct = segnet::binarize(flip_x(segnet::segment(model(), t.image)), 0.5);
    const BinaryMask flipped = segnet::binarize(segnet::segment(model(), flip_x(t.image)), 0.5);
    CHECK(mask_iou(direct, flipped) > 0.8);
  }
}

TEST_CASE("one tile segments within 2 s") {
  if (!have_model()) return;
  const Tile t = snr_tile(10.0, 0x71);
  segnet::segment(model(), t.image);
  const auto t0 = std::chrono::steady_clock::now();
  segnet::segment(model(), t.image);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 2.0);
}

TEST_CASE("desk training log") {
  std::filesystem::path log = kModel;
  log.replace_extension(".log");
  if (!std::filesystem::exists(log)) log = kModel.parent_path() / "desk_train.log";
  if (!have_model() || !std::filesystem::exists(log)) return;
  const auto records = segnet::read_train_log(log);
  REQUIRE(records.size() >= 10);
  CHECK(records[0].epoch == 1);
  CHECK(records[9].train_loss <= 0.5 * records[0].train_loss);
  MESSAGE("final val IoU " << records.back().val_iou << " after " << records.back().epoch << " epochs");
}

TEST_CASE("full frames: trail-free and one SNR-20 trail across four tiles") {
  if (!have_model()) return;
  const cli::RunConfig cfg;
  const int w = cfg.frames.width, h = cfg.frames.height;
  const TileGrid grid = make_tile_grid(w, h, cfg.grid_rows, cfg.grid_cols, cfg.grid_overlap);
  Raster frame = sim::make_star_field(w, h, cfg.field, 0xF4A3);

  const auto empty = pipeline::detect_frame(frame, model(), grid, cfg.detect);
  CHECK(empty.merged_trails.empty());

  sim::TrailSpec spec;
  spec.p0 = {3000.0, 2100.0};
  spec.p1 = {6400.0, 4500.0};
  spec.fwhm = cfg.field.psf.fwhm();
  int crossed = 0;
  for (const auto& b : grid.boxes) crossed += crosses(b, spec.p0, spec.p1);
  REQUIRE(crossed >= 4);
  spec.peak_amplitude = sim::solve_peak_for_snr(20.0, spec, cfg.field.noise, frame);
  BinaryMask truth(w, h);
  sim::add_trail(frame, truth, spec, 0xF4A4, sim::NoiseMode::kPoisson);

  const auto det = pipeline::detect_frame(frame, model(), grid, cfg.detect);
  REQUIRE(det.merged_trails.size() == 1);
  CHECK(orientation_diff(det.merged_trails[0].segment.angle, line_angle(spec.p0, spec.p1)) < 1.0 * linedet::kDegree);
  const auto r = eval::match_trails(det.merged_trails, std::vector{spec},
                                    cfg.criteria.scaled(pipeline::tile_scale(grid.boxes[0], 256)));
  CHECK(r.tp == 1);
}

TEST_CASE("detection rate at SNR 0 and 30") {
  if (!have_model()) return;
  const cli::RunConfig cfg;
  eval::SnrSweepOptions o;
  o.field = cfg.field;
  o.criteria = cfg.criteria;
  o.detect = cfg.detect;
  const std::vector<double> snrs = {0.0, 30.0};
  const auto curve = eval::snr_sweep(model(), snrs, 100, 0xD37, o);
  MESSAGE("rate at SNR 0: " << curve.points[0].rate() << ", at SNR 30: " << curve.points[1].rate());
  CHECK(curve.points[0].rate() <= 0.05);
  CHECK(curve.points[1].rate() >= 0.99);
}
