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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trailkit/geometry.hpp"
#include "trailkit/linedet.hpp"
#include "trailkit/raster.hpp"
#include "trailkit/segnet.hpp"

namespace trailkit::pipeline {

struct DetectOptions {
  linedet::LsdParams lsd;
  linedet::MergeParams merge;  ///< tile-scale tolerances
  /// Feed LSD the probability map (scaled to grey levels) rather than the
  /// binarised mask.
  bool soft_input = true;
  double binarize_threshold = 0.5;
  /// <= 0 picks linedet::default_mask_halfwidth from the frame's PSF_FWHM
  /// metadata, if any.
  double mask_halfwidth = 0.0;
  int batch_size = 4;  ///< tiles per network forward pass

  void validate() const;
};

/// Segments of one tile in tile coordinates, before length filtering.
struct TileResult {
  TileBox box;
  std::vector<linedet::LineSegment> segments;
};

using Timing = std::vector<std::pair<std::string, double>>;

struct FrameDetection {
  std::string frame_id;
  int width = 0;
  int height = 0;
  int tile_size = 0;
  std::vector<TileResult> tile_results;  ///< sorted by box
  std::vector<linedet::TrailLine> merged_trails;
  BinaryMask mask;
  Timing timing;  ///< seconds per stage, in execution order
};

/// Tile <-> frame maps of the crop + resample of `box` to a tile_size square.
Point2 tile_to_frame(Point2 p, const TileBox& box, int tile_size);
Point2 frame_to_tile(Point2 p, const TileBox& box, int tile_size);

/// Resample factor of a tile, the larger of the two axes.
double tile_scale(const TileBox& box, int tile_size);

/// Probability map of one tile to candidate lines: LSD on the soft map (or
/// on the binarised mask) followed by linedet::consolidate. No length filter.
std::vector<linedet::LineSegment> tile_lines(const Raster& prob, const DetectOptions& options);

/// Length filter per tile, mapping to the frame, cross-tile merge with the
/// tolerances scaled by the resample factor, extension to the frame borders
/// and the union mask (left empty unless with_mask). Filled into `det`,
/// which must carry tile results.
void assemble(FrameDetection& det, const DetectOptions& options, std::optional<double> psf_fwhm,
              bool with_mask = true);

FrameDetection detect_frame(const Raster& frame, const segnet::NetworkParams& net, const TileGrid& grid,
                            const DetectOptions& options, std::string frame_id = "frame");

/// Single-tile post-processing of a probability map: tile_lines, length
/// filter, extension to the tile borders.
std::vector<linedet::TrailLine> tile_trails(const Raster& prob, const DetectOptions& options,
                                            std::optional<double> psf_fwhm);

/// Single-tile path: segment, then tile_trails. The tile must be
/// the network input size.
std::vector<linedet::TrailLine> detect_tile(const Raster& tile, const segnet::NetworkParams& net,
                                            const DetectOptions& options);

struct SourceFlag {
  std::size_t index;
  bool flagged;
};

/// A source is flagged when the mask pixel containing it is set.
std::vector<SourceFlag> flag_sources(std::span<const Point2> catalog, const FrameDetection& detection);

/// Writes <dir>/<id>_mask.trsc (flat-binary u8), <id>_trails.txt (extended
/// lines), <id>_segments.txt (merged segments before extension) and
/// <id>_timing.txt (one "stage seconds" pair per line), plus
/// <id>_tiles.txt with the raw tile results for later re-assembly.
void write_bundle(const FrameDetection& detection, const std::filesystem::path& dir);

/// Trail list format: the segment serialization of the extended lines
/// (x0 y0 x1 y1 width nfa_log10), preceded by a "# halfwidth <hw>" line.
std::vector<linedet::TrailLine> read_trails(const std::filesystem::path& path);

/// Tile results file: "frame <w> <h> <tile_size>", then per tile a line
/// "tile <x0> <y0> <x1> <y1> <n>" followed by n segment lines.
void write_tile_results(const FrameDetection& detection, const std::filesystem::path& path);
/// Geometry and tile results only; trails and mask are left empty.
FrameDetection read_tile_results(const std::filesystem::path& path);

}  // namespace trailkit::pipeline
