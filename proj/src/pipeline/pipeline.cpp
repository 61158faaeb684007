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

#include "trailkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "trailkit/error.hpp"

namespace trailkit::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::optional<double> frame_fwhm(const Raster& frame) {
  const auto it = frame.meta().find("PSF_FWHM");
  if (it == frame.meta().end()) return std::nullopt;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

void DetectOptions::validate() const {
  lsd.validate();
  require(binarize_threshold > 0.0 && binarize_threshold < 1.0, "binarize threshold must lie in (0, 1)");
  require(batch_size >= 1, "batch size must be >= 1");
  require(merge.max_angle > 0.0 && merge.max_offset >= 0.0, "merge tolerances must be positive");
}

Point2 tile_to_frame(Point2 p, const TileBox& box, int tile_size) {
  const double sx = static_cast<double>(box.width()) / tile_size;
  const double sy = static_cast<double>(box.height()) / tile_size;
  return {box.x0 + p.x * sx, box.y0 + p.y * sy};
}

Point2 frame_to_tile(Point2 p, const TileBox& box, int tile_size) {
  const double sx = static_cast<double>(tile_size) / box.width();
  const double sy = static_cast<double>(tile_size) / box.height();
  return {(p.x - box.x0) * sx, (p.y - box.y0) * sy};
}

double tile_scale(const TileBox& box, int tile_size) {
  return static_cast<double>(std::max(box.width(), box.height())) / tile_size;
}

std::vector<linedet::LineSegment> tile_lines(const Raster& prob, const DetectOptions& options) {
  std::vector<linedet::LineSegment> raw;
  if (options.soft_input) {
    raw = linedet::lsd_detect(linedet::probability_to_grey(prob), options.lsd);
  } else {
    raw = linedet::lsd_detect(segnet::binarize(prob, options.binarize_threshold), options.lsd);
  }
  return linedet::consolidate(raw, options.merge);
}

void assemble(FrameDetection& det, const DetectOptions& options, std::optional<double> psf_fwhm, bool with_mask) {
  require(det.tile_size > 0 && det.width > 0 && det.height > 0, "frame detection has no geometry");
  std::stable_sort(det.tile_results.begin(), det.tile_results.end(),
                   [](const TileResult& a, const TileResult& b) { return a.box < b.box; });

  double scale = 1.0;
  std::vector<linedet::LineSegment> mapped;
  for (const TileResult& t : det.tile_results) {
    const double s = tile_scale(t.box, det.tile_size);
    scale = std::max(scale, s);
    for (const auto& seg : linedet::filter_min_length(t.segments, det.tile_size, options.lsd.min_length_ratio)) {
      mapped.push_back(linedet::make_segment(tile_to_frame(seg.p0, t.box, det.tile_size),
                                             tile_to_frame(seg.p1, t.box, det.tile_size), seg.width * s,
                                             seg.nfa_log10));
    }
  }
  const linedet::MergeParams m = options.merge.scaled(scale);
  auto merged = linedet::merge_collinear(mapped, m.max_angle, m.max_offset, false);
  std::stable_sort(merged.begin(), merged.end(),
                   [](const linedet::LineSegment& a, const linedet::LineSegment& b) { return a.length() > b.length(); });

  const double hw = options.mask_halfwidth > 0.0 ? options.mask_halfwidth : linedet::default_mask_halfwidth(psf_fwhm);
  det.merged_trails.clear();
  for (const auto& seg : merged) {
    if (seg.length() <= 0.0) continue;
    det.merged_trails.push_back(linedet::extend_to_borders(seg, det.width, det.height, hw));
  }
  det.mask = with_mask ? linedet::trail_mask(det.merged_trails, det.width, det.height) : BinaryMask();
}

FrameDetection detect_frame(const Raster& frame, const segnet::NetworkParams& net, const TileGrid& grid,
                            const DetectOptions& options, std::string frame_id) {
  options.validate();
  require(!grid.boxes.empty(), "tile grid is empty");
  for (const TileBox& b : grid.boxes) {
    require(b.x0 >= 0 && b.y0 >= 0 && b.x1 <= frame.width() && b.y1 <= frame.height(),
            "tile grid does not fit the frame");
  }
  const auto t_start = Clock::now();
  FrameDetection det;
  det.frame_id = std::move(frame_id);
  det.width = frame.width();
  det.height = frame.height();
  det.tile_size = net.config.input_size;
  const std::size_t n = grid.boxes.size();

  auto t0 = Clock::now();
  std::vector<Raster> tiles(n);
  for (std::size_t i = 0; i < n; ++i) tiles[i] = resample_region(frame, grid.boxes[i], det.tile_size, det.tile_size);
  det.timing.emplace_back("resample", seconds_since(t0));

  t0 = Clock::now();
  std::vector<Raster> probs;
  probs.reserve(n);
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(options.batch_size)) {
    const std::size_t k = std::min(n - i, static_cast<std::size_t>(options.batch_size));
    auto batch = segnet::segment_batch(net, std::span<const Raster>(tiles.data() + i, k));
    for (auto& p : batch) probs.push_back(std::move(p));
  }
  det.timing.emplace_back("segment", seconds_since(t0));

  t0 = Clock::now();
  det.tile_results.resize(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      det.tile_results[i] = {grid.boxes[i], tile_lines(probs[i], options)};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  det.timing.emplace_back("lsd", seconds_since(t0));

  t0 = Clock::now();
  assemble(det, options, frame_fwhm(frame));
  det.timing.emplace_back("merge_mask", seconds_since(t0));
  det.timing.emplace_back("total", seconds_since(t_start));
  return det;
}

std::vector<linedet::TrailLine> tile_trails(const Raster& prob, const DetectOptions& options,
                                            std::optional<double> psf_fwhm) {
  FrameDetection det;
  det.width = prob.width();
  det.height = prob.height();
  det.tile_size = std::max(prob.width(), prob.height());
  det.tile_results.push_back({TileBox{0, 0, prob.width(), prob.height()}, tile_lines(prob, options)});
  assemble(det, options, psf_fwhm);
  return det.merged_trails;
}

std::vector<linedet::TrailLine> detect_tile(const Raster& tile, const segnet::NetworkParams& net,
                                            const DetectOptions& options) {
  options.validate();
  return tile_trails(segnet::segment(net, tile), options, frame_fwhm(tile));
}

std::vector<SourceFlag> flag_sources(std::span<const Point2> catalog, const FrameDetection& detection) {
  const BinaryMask& mask = detection.mask;
  std::vector<SourceFlag> out;
  out.reserve(catalog.size());
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    const Point2 p = catalog[i];
    require(p.x >= 0.0 && p.y >= 0.0 && p.x < mask.width() && p.y < mask.height(),
            "source position outside the frame");
    out.push_back({i, mask(static_cast<int>(p.x), static_cast<int>(p.y))});
  }
  return out;
}

}  // namespace trailkit::pipeline
