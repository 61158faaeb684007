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
#include <cmath>

#include "trailkit/error.hpp"
#include "trailkit/raster.hpp"

namespace trailkit {
namespace {

struct Tap {
  int index;
  double weight;
};

// For each output cell, the input cells it overlaps and the fraction of the
// output cell each one covers. Weights of one output cell sum to 1.
std::vector<std::vector<Tap>> box_taps(int in_extent, int out_extent) {
  std::vector<std::vector<Tap>> taps(static_cast<std::size_t>(out_extent));
  const double scale = static_cast<double>(in_extent) / out_extent;
  for (int o = 0; o < out_extent; ++o) {
    const double lo = o * scale;
    const double hi = (o + 1) * scale;
    const int first = static_cast<int>(std::floor(lo));
    const int last = std::min(in_extent - 1, static_cast<int>(std::ceil(hi)) - 1);
    for (int i = first; i <= last; ++i) {
      const double w = std::min(hi, i + 1.0) - std::max(lo, static_cast<double>(i));
      if (w > 0.0) taps[static_cast<std::size_t>(o)].push_back({i, w / scale});
    }
  }
  return taps;
}

}  // namespace

Raster resample_region(const Raster& img, const TileBox& box, int out_w, int out_h) {
  require(out_w >= 1 && out_h >= 1, "resample: output dimensions must be >= 1");
  require(box.x0 >= 0 && box.y0 >= 0 && box.x1 <= img.width() && box.y1 <= img.height() && box.x0 < box.x1 &&
              box.y0 < box.y1,
          "resample: region outside image");
  const int in_w = box.width();
  const int in_h = box.height();
  if (in_w == out_w && in_h == out_h) return crop(img, box);

  const auto xt = box_taps(in_w, out_w);
  const auto yt = box_taps(in_h, out_h);

  // Horizontal pass into an out_w x in_h buffer.
  std::vector<double> tmp(static_cast<std::size_t>(out_w) * in_h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < in_h; ++y) {
    const auto src = img.row(box.y0 + y);
    double* dst = tmp.data() + static_cast<std::size_t>(y) * out_w;
    for (int ox = 0; ox < out_w; ++ox) {
      double acc = 0.0;
      for (const Tap& t : xt[static_cast<std::size_t>(ox)]) acc += t.weight * src[static_cast<std::size_t>(box.x0 + t.index)];
      dst[ox] = acc;
    }
  }

  Raster out(out_w, out_h);
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out_h; ++oy) {
    std::vector<double> acc(static_cast<std::size_t>(out_w), 0.0);
    for (const Tap& t : yt[static_cast<std::size_t>(oy)]) {
      const double* src = tmp.data() + static_cast<std::size_t>(t.index) * out_w;
      for (int ox = 0; ox < out_w; ++ox) acc[static_cast<std::size_t>(ox)] += t.weight * src[ox];
    }
    for (int ox = 0; ox < out_w; ++ox) out(ox, oy) = static_cast<float>(acc[static_cast<std::size_t>(ox)]);
  }
  out.meta() = img.meta();
  return out;
}

Raster resample(const Raster& img, int out_w, int out_h) {
  return resample_region(img, TileBox{0, 0, img.width(), img.height()}, out_w, out_h);
}

}  // namespace trailkit
