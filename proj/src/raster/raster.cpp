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

#include "trailkit/raster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trailkit/error.hpp"

namespace trailkit {

Raster::Raster(int width, int height, float fill) : width_(width), height_(height) {
  require(width > 0 && height > 0, "raster dimensions must be positive");
  pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Raster::Raster(int width, int height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  require(width > 0 && height > 0, "raster dimensions must be positive");
  if (pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorCategory::kFormat, "pixel count does not match width x height");
  }
}

void Raster::validate() const {
  for (std::size_t i = 0; i < pixels_.size(); ++i) {
    const float v = pixels_[i];
    if (!std::isfinite(v) || v < 0.0f) {
      fail(ErrorCategory::kRange, "pixel " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

double Raster::sum() const {
  double s = 0.0;
  for (float v : pixels_) s += v;
  return s;
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
  require(width > 0 && height > 0, "mask dimensions must be positive");
  bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0);
}

std::size_t BinaryMask::popcount() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Raster mask_to_raster(const BinaryMask& mask, float on_value) {
  Raster out(mask.width(), mask.height());
  auto dst = out.pixels();
  auto src = mask.bits();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? on_value : 0.0f;
  return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  require(a.width() == b.width() && a.height() == b.height(), "mask_iou: size mismatch");
  std::size_t inter = 0;
  std::size_t uni = 0;
  auto x = a.bits();
  auto y = b.bits();
  for (std::size_t i = 0; i < x.size(); ++i) {
    inter += (x[i] & y[i]);
    uni += (x[i] | y[i]);
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace trailkit
