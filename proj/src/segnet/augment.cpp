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

#include <cstdlib>

#include "trailkit/error.hpp"
#include "trailkit/segnet/unet.hpp"

namespace trailkit::segnet {
namespace {

int reflect(int i, int n) {
  // Symmetric reflection (edge pixel repeated); |shift| < n keeps one fold enough.
  if (i < 0) return -1 - i;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

}  // namespace

AugmentParams draw_augmentation(std::mt19937_64& rng, unsigned enabled, int max_translation) {
  AugmentParams a;
  if (enabled & kAugRotation) a.quarter_turns = std::uniform_int_distribution<int>(0, 3)(rng);
  if (enabled & kAugFlip) a.flip = std::uniform_int_distribution<int>(0, 1)(rng) == 1;
  if ((enabled & kAugTranslation) && max_translation > 0) {
    std::uniform_int_distribution<int> shift(-max_translation, max_translation);
    a.dx = shift(rng);
    a.dy = shift(rng);
  }
  return a;
}

void apply_augmentation(std::span<const float> src, int size, const AugmentParams& a, std::span<float> dst) {
  const auto n = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
  require(src.size() == n && dst.size() == n, "augmentation buffer size mismatch");
  require(std::abs(a.dx) < size && std::abs(a.dy) < size, "translation must be smaller than the tile");
  const int turns = ((a.quarter_turns % 4) + 4) % 4;
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      // Invert the output transform: flip, then rotation, then translation.
      int u = a.flip ? size - 1 - x : x;
      int v = y;
      for (int t = 0; t < turns; ++t) {
        // Inverse of a counter-clockwise quarter turn (x, y) -> (y, size-1-x).
        const int nu = size - 1 - v;
        v = u;
        u = nu;
      }
      const int sx = reflect(u - a.dx, size);
      const int sy = reflect(v - a.dy, size);
      dst[static_cast<std::size_t>(y) * size + x] = src[static_cast<std::size_t>(sy) * size + sx];
    }
  }
}

}  // namespace trailkit::segnet
