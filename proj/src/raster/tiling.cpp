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

#include <cmath>

#include "trailkit/error.hpp"
#include "trailkit/raster.hpp"

namespace trailkit {
namespace {

struct AxisSplit {
  int tile = 0;
  std::vector<int> starts;
};

AxisSplit split_axis(int extent, int count, double overlap) {
  AxisSplit s;
  if (count == 1) {
    s.tile = extent;
    s.starts = {0};
    return s;
  }
  const double base = static_cast<double>(extent) / count;
  // Smallest side at or above the nominal one whose evenly spread origins
  // leave every neighbour pair at least overlap x side apart.
  int tile = std::max(static_cast<int>(std::ceil(base)), static_cast<int>(std::lround(base * (1.0 + overlap))));
  for (; tile <= extent; ++tile) {
    const double step = static_cast<double>(extent - tile) / (count - 1);
    s.starts.clear();
    for (int i = 0; i < count; ++i) s.starts.push_back(static_cast<int>(std::lround(i * step)));
    int min_overlap = tile;
    for (int i = 0; i + 1 < count; ++i) min_overlap = std::min(min_overlap, s.starts[i] + tile - s.starts[i + 1]);
    if (min_overlap >= overlap * tile - 1e-9) break;
  }
  if (tile > extent) {
    fail(ErrorCategory::kPrecondition,
         "overlap fraction " + std::to_string(overlap) + " too large for a grid of " + std::to_string(count) +
             " tiles over " + std::to_string(extent) + " px");
  }
  s.tile = tile;
  return s;
}

}  // namespace

TileGrid make_tile_grid(int frame_w, int frame_h, int rows, int cols, double overlap_fraction) {
  require(frame_w > 0 && frame_h > 0, "frame dimensions must be positive");
  require(rows >= 1 && cols >= 1, "tile grid needs at least one row and column");
  require(rows <= frame_h && cols <= frame_w, "more tiles than pixels along an axis");
  require(overlap_fraction >= 0.0 && overlap_fraction < 0.5, "overlap fraction must lie in [0, 0.5)");
  const AxisSplit xs = split_axis(frame_w, cols, overlap_fraction);
  const AxisSplit ys = split_axis(frame_h, rows, overlap_fraction);
  TileGrid grid{rows, cols, overlap_fraction, {}};
  grid.boxes.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      grid.boxes.push_back({xs.starts[c], ys.starts[r], xs.starts[c] + xs.tile, ys.starts[r] + ys.tile});
    }
  }
  return grid;
}

Raster crop(const Raster& img, const TileBox& box) {
  require(box.x0 >= 0 && box.y0 >= 0 && box.x1 <= img.width() && box.y1 <= img.height() && box.x0 < box.x1 &&
              box.y0 < box.y1,
          "crop box outside image");
  Raster out(box.width(), box.height());
  for (int y = 0; y < box.height(); ++y) {
    const auto src = img.row(box.y0 + y);
    std::copy(src.begin() + box.x0, src.begin() + box.x1, out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * box.width());
  }
  out.meta() = img.meta();
  return out;
}

}  // namespace trailkit
