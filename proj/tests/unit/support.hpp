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

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "trailkit/geometry.hpp"
#include "trailkit/raster.hpp"

namespace trailkit::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("trailkit_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Bright band of the given width between a and b, 4x4 supersampled, on a
/// zero background; band pixels reach `level`.
inline Raster ideal_line(int w, int h, Point2 a, Point2 b, double width, double level = 255.0) {
  Raster img(w, h);
  const double len = distance(a, b);
  const Point2 dir = (1.0 / len) * (b - a);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double cover = 0.0;
      for (int sy = 0; sy < 4; ++sy) {
        for (int sx = 0; sx < 4; ++sx) {
          const Point2 p{x + (sx + 0.5) / 4.0, y + (sy + 0.5) / 4.0};
          const double t = dot(p - a, dir);
          if (t >= 0.0 && t <= len && line_distance(p, a, b) <= width / 2.0) cover += 1.0 / 16.0;
        }
      }
      img(x, y) = static_cast<float>(level * cover);
    }
  }
  return img;
}

}  // namespace trailkit::testing
