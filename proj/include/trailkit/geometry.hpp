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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>

// Continuous image coordinates: pixel (i, j) covers [i, i+1) x [j, j+1), so
// its center sits at (i + 0.5, j + 0.5) and a W x H image spans [0, W] x [0, H].

namespace trailkit {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

/// Orientation of the undirected line through a and b, folded into [0, pi).
inline double line_angle(Point2 a, Point2 b) {
  double t = std::atan2(b.y - a.y, b.x - a.x);
  if (t < 0.0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

/// Smallest difference between two undirected orientations, in [0, pi/2].
inline double orientation_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), std::numbers::pi);
  return d > std::numbers::pi / 2 ? std::numbers::pi - d : d;
}

/// Perpendicular distance from p to the infinite line through a and b.
inline double line_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len = norm(d);
  if (len == 0.0) return distance(p, a);
  return std::abs(cross(d, p - a)) / len;
}

/// Distance from p to the closed segment [a, b].
inline double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  double t = dot(p - a, d) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * d);
}

struct Rect {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;
};

/// Liang-Barsky clip of the infinite line through a and b against `r`.
/// Returns the entry and exit points ordered along a->b, or nothing when the
/// line misses the rectangle (or only grazes a corner).
inline std::optional<std::pair<Point2, Point2>> clip_line(Point2 a, Point2 b, const Rect& r) {
  const Point2 d = b - a;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  const double p[4] = {-d.x, d.x, -d.y, d.y};
  const double q[4] = {a.x - r.x0, r.x1 - a.x, a.y - r.y0, r.y1 - a.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) t0 = std::max(t0, t);
    else t1 = std::min(t1, t);
  }
  if (!(t0 < t1) || !std::isfinite(t0) || !std::isfinite(t1)) return std::nullopt;
  return std::make_pair(a + t0 * d, a + t1 * d);
}

/// Clip the closed segment [a, b] to `r`.
inline std::optional<std::pair<Point2, Point2>> clip_segment(Point2 a, Point2 b, const Rect& r) {
  auto line = clip_line(a, b, r);
  if (!line) return std::nullopt;
  const Point2 d = b - a;
  const double len2 = dot(d, d);
  double t0 = dot(line->first - a, d) / len2;
  double t1 = dot(line->second - a, d) / len2;
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, 1.0);
  if (!(t0 < t1)) return std::nullopt;
  return std::make_pair(a + t0 * d, a + t1 * d);
}

}  // namespace trailkit
