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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace trailkit {

using Metadata = std::map<std::string, std::string>;

/// Row-major single-channel image in electrons. Pixels are finite and >= 0
/// whenever a Raster crosses a module boundary; `validate()` checks that.
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, float fill = 0.0f);
  Raster(int width, int height, std::vector<float> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  float operator()(int x, int y) const { return pixels_[index(x, y)]; }
  float& operator()(int x, int y) { return pixels_[index(x, y)]; }

  std::span<const float> pixels() const { return pixels_; }
  std::span<float> pixels() { return pixels_; }
  std::span<const float> row(int y) const {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }

  const Metadata& meta() const { return meta_; }
  Metadata& meta() { return meta_; }

  /// Throws kRange if any pixel is negative or non-finite.
  void validate() const;

  double sum() const;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
  Metadata meta_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return bits_.size(); }

  bool operator()(int x, int y) const { return bits_[index(x, y)] != 0; }
  void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const { return bits_; }
  std::span<std::uint8_t> bits() { return bits_; }

  std::size_t popcount() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// 0/1 raster view of a mask, scaled by `on_value`.
Raster mask_to_raster(const BinaryMask& mask, float on_value = 1.0f);

/// Intersection-over-union of two equally sized masks; 1 when both are empty.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

// ---------------------------------------------------------------------------
// File I/O

enum class RasterFormat {
  kFitsLike,        ///< single-HDU FITS, BITPIX=-32, header cards -> metadata
  kPortableGray16,  ///< binary PGM (P5), maxval 65535, big-endian samples
  kFlatBinary,      ///< "TRSC" container, see raster_io.cpp
};

RasterFormat parse_raster_format(const std::string& name);
/// Picks a format from the file extension (.fits/.fit, .pgm, .trsc).
RasterFormat format_from_extension(const std::filesystem::path& path);

Raster load_raster(const std::filesystem::path& path, RasterFormat format);
void save_raster(const Raster& img, const std::filesystem::path& path, RasterFormat format);

void save_mask(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Tiling and resampling

/// Half-open pixel rectangle [x0, x1) x [y0, y1) in parent-frame coordinates.
struct TileBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  friend bool operator==(const TileBox&, const TileBox&) = default;
  friend auto operator<=>(const TileBox&, const TileBox&) = default;
};

struct TileGrid {
  int rows = 0;
  int cols = 0;
  double overlap_fraction = 0.0;
  std::vector<TileBox> boxes;  ///< row-major, rows * cols entries
};

/// Equal-size tiles of side round(base * (1 + overlap)) with evenly spread
/// origins, where base = frame / count; the side grows by whole pixels when
/// rounding would leave neighbours sharing less than overlap_fraction * side.
TileGrid make_tile_grid(int frame_w, int frame_h, int rows, int cols, double overlap_fraction);

Raster crop(const Raster& img, const TileBox& box);

/// Area-weighted (box filter) resampling. The output is a mean-preserving
/// average, so total flux scales exactly by the area ratio.
Raster resample(const Raster& img, int out_w, int out_h);

/// Crop followed by resample without materialising the crop.
Raster resample_region(const Raster& img, const TileBox& box, int out_w, int out_h);

}  // namespace trailkit
