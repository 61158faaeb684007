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
#include <numbers>
#include <tuple>

#include "trailkit/error.hpp"
#include "trailkit/evalkit.hpp"

namespace trailkit::eval {

MatchCriteria MatchCriteria::scaled(double factor) const {
  MatchCriteria c = *this;
  c.max_perp_distance *= factor;
  return c;
}

void MatchCriteria::validate() const {
  require(max_angle_diff > 0.0 && max_angle_diff <= std::numbers::pi / 2, "max_angle_diff must lie in (0, pi/2]");
  require(max_perp_distance > 0.0, "max_perp_distance must be positive");
  require(min_overlap_fraction > 0.0 && min_overlap_fraction <= 1.0, "min_overlap_fraction must lie in (0, 1]");
}

PairGeometry pair_geometry(const linedet::TrailLine& detected, const sim::TrailSpec& truth, double band_halfwidth) {
  const Point2 a = detected.extended_p0;
  const Point2 b = detected.extended_p1;
  PairGeometry g;
  g.angle_diff = orientation_diff(line_angle(a, b), line_angle(truth.p0, truth.p1));

  const double len = distance(a, b);
  require(len > 0.0, "detected line has zero length");
  const Point2 u = (1.0 / len) * (b - a);
  // Signed distance to the detected line is linear along the truth segment.
  const double d0 = cross(u, truth.p0 - a);
  const double d1 = cross(u, truth.p1 - a);
  const double a0 = std::abs(d0);
  const double a1 = std::abs(d1);
  if (d0 * d1 >= 0.0) {
    g.mean_distance = 0.5 * (a0 + a1);
  } else {
    g.mean_distance = (d0 * d0 + d1 * d1) / (2.0 * (a0 + a1));
  }

  const double delta = d1 - d0;
  if (delta == 0.0) {
    g.overlap_fraction = a0 <= band_halfwidth ? 1.0 : 0.0;
  } else {
    double t0 = (-band_halfwidth - d0) / delta;
    double t1 = (band_halfwidth - d0) / delta;
    if (t0 > t1) std::swap(t0, t1);
    g.overlap_fraction = std::max(0.0, std::min(1.0, t1) - std::max(0.0, t0));
  }
  return g;
}

bool pair_matches(const PairGeometry& g, const MatchCriteria& c) {
  return g.angle_diff <= c.max_angle_diff && g.mean_distance <= c.max_perp_distance &&
         g.overlap_fraction >= c.min_overlap_fraction;
}

MatchResult match_trails(std::span<const linedet::TrailLine> detected, std::span<const sim::TrailSpec> truth,
                         const MatchCriteria& criteria) {
  criteria.validate();
  std::vector<std::tuple<double, int, int>> candidates;
  for (std::size_t i = 0; i < detected.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (truth[j].length() <= 0.0) continue;
      const PairGeometry g = pair_geometry(detected[i], truth[j], criteria.max_perp_distance);
      if (pair_matches(g, criteria)) candidates.emplace_back(g.mean_distance, static_cast<int>(i), static_cast<int>(j));
    }
  }
  std::sort(candidates.begin(), candidates.end());

  MatchResult r;
  std::vector<bool> det_used(detected.size(), false), truth_used(truth.size(), false);
  for (const auto& [d, i, j] : candidates) {
    if (det_used[static_cast<std::size_t>(i)] || truth_used[static_cast<std::size_t>(j)]) continue;
    det_used[static_cast<std::size_t>(i)] = truth_used[static_cast<std::size_t>(j)] = true;
    r.assignment.emplace_back(i, j);
  }
  r.tp = static_cast<int>(r.assignment.size());
  r.fp = static_cast<int>(detected.size()) - r.tp;
  r.fn = static_cast<int>(truth.size()) - r.tp;
  return r;
}

}  // namespace trailkit::eval
