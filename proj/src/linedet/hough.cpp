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

// Baseline detector for comparisons. Lines are parameterised about the image
// centre c as rho = (p - c) . (cos theta, sin theta), theta_i = i * pi / A,
// rho in [-R, R] with R the half diagonal. Peaks closer than kSuppress bins
// (in both axes) to a stronger peak are dropped. The vote count of a line is
// reported in the nfa_log10 field.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trailkit/error.hpp"
#include "trailkit/linedet.hpp"

namespace trailkit::linedet {
namespace {

constexpr int kSuppress = 3;

struct Peak {
  int a;
  int r;
  int votes;
};

}  // namespace

std::vector<LineSegment> hough_detect(const BinaryMask& mask, int angle_bins, int rho_bins, int vote_threshold) {
  require(angle_bins >= 1 && rho_bins >= 1, "Hough bin counts must be >= 1");
  const int w = mask.width();
  const int h = mask.height();
  std::vector<Point2> pts;
  int minx = w, miny = h, maxx = -1, maxy = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(x, y)) continue;
      pts.push_back({x + 0.5, y + 0.5});
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
  }
  if (pts.empty()) return {};

  const Point2 c{0.5 * w, 0.5 * h};
  const double R = 0.5 * std::hypot(static_cast<double>(w), static_cast<double>(h));
  const double rho_step = 2.0 * R / rho_bins;
  std::vector<double> cs(static_cast<std::size_t>(angle_bins)), sn(static_cast<std::size_t>(angle_bins));
  for (int a = 0; a < angle_bins; ++a) {
    const double t = a * std::numbers::pi / angle_bins;
    cs[static_cast<std::size_t>(a)] = std::cos(t);
    sn[static_cast<std::size_t>(a)] = std::sin(t);
  }
  std::vector<int> acc(static_cast<std::size_t>(angle_bins) * static_cast<std::size_t>(rho_bins), 0);
  auto cell = [&](int a, int r) -> int& {
    return acc[static_cast<std::size_t>(a) * static_cast<std::size_t>(rho_bins) + static_cast<std::size_t>(r)];
  };
#pragma omp parallel for schedule(static)
  for (int a = 0; a < angle_bins; ++a) {
    for (const Point2& p : pts) {
      const double rho = (p.x - c.x) * cs[static_cast<std::size_t>(a)] + (p.y - c.y) * sn[static_cast<std::size_t>(a)];
      const int r = std::clamp(static_cast<int>(std::floor((rho + R) / rho_step)), 0, rho_bins - 1);
      ++cell(a, r);
    }
  }

  // 3x3 local maxima; across theta = 0 / pi the neighbour has rho negated.
  auto votes_at = [&](int a, int r) -> int {
    if (a < 0) {
      a += angle_bins;
      r = rho_bins - 1 - r;
    } else if (a >= angle_bins) {
      a -= angle_bins;
      r = rho_bins - 1 - r;
    }
    if (r < 0 || r >= rho_bins) return -1;
    return cell(a, r);
  };
  std::vector<Peak> peaks;
  for (int a = 0; a < angle_bins; ++a) {
    for (int r = 0; r < rho_bins; ++r) {
      const int v = cell(a, r);
      if (v < vote_threshold || v == 0) continue;
      bool is_max = true;
      for (int da = -1; da <= 1 && is_max; ++da) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (da == 0 && dr == 0) continue;
          const int u = votes_at(a + da, r + dr);
          // Strict against earlier cells, non-strict against later ones, so
          // a plateau yields exactly one peak.
          const bool earlier = da < 0 || (da == 0 && dr < 0);
          if (earlier ? u >= v : u > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({a, r, v});
    }
  }
  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& x, const Peak& y) { return x.votes > y.votes; });

  std::vector<Peak> kept;
  for (const Peak& p : peaks) {
    bool suppressed = false;
    for (const Peak& q : kept) {
      int da = std::abs(p.a - q.a);
      int dr = std::abs(p.r - q.r);
      if (angle_bins - da < da) {
        da = angle_bins - da;
        dr = std::abs(p.r - (rho_bins - 1 - q.r));
      }
      if (da <= kSuppress && dr <= kSuppress) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(p);
  }

  const Rect box{static_cast<double>(minx), static_cast<double>(miny), maxx + 1.0, maxy + 1.0};
  std::vector<LineSegment> out;
  for (const Peak& p : kept) {
    const double ca = cs[static_cast<std::size_t>(p.a)];
    const double sa = sn[static_cast<std::size_t>(p.a)];
    const double rho = -R + (p.r + 0.5) * rho_step;
    const Point2 foot{c.x + rho * ca, c.y + rho * sa};
    const Point2 dir{-sa, ca};
    const auto clipped = clip_line(foot, foot + dir, box);
    if (!clipped) continue;
    out.push_back(make_segment(clipped->first, clipped->second, 1.0, static_cast<double>(p.votes)));
  }
  return out;
}

}  // namespace trailkit::linedet
