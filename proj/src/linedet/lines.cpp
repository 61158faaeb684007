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
#include <numeric>

#include "trailkit/error.hpp"
#include "trailkit/linedet.hpp"

namespace trailkit::linedet {
namespace {

Point2 midpoint(const LineSegment& s) { return 0.5 * (s.p0 + s.p1); }

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Line through the length-weighted centroid along the length-weighted mean
// orientation (averaged on doubled angles), spanning every member endpoint.
LineSegment fit_span(std::span<const LineSegment* const> members, Point2 reference_dir, double width) {
  double c2 = 0.0, s2 = 0.0, wsum = 0.0, nfa = -std::numeric_limits<double>::infinity();
  Point2 centroid{};
  for (const LineSegment* s : members) {
    const double len = s->length();
    const double t = std::atan2(s->p1.y - s->p0.y, s->p1.x - s->p0.x);
    c2 += len * std::cos(2.0 * t);
    s2 += len * std::sin(2.0 * t);
    centroid = centroid + len * midpoint(*s);
    wsum += len;
    nfa = std::max(nfa, s->nfa_log10);
  }
  centroid = (1.0 / wsum) * centroid;
  const double theta = 0.5 * std::atan2(s2, c2);
  Point2 u{std::cos(theta), std::sin(theta)};
  if (dot(u, reference_dir) < 0.0) u = -1.0 * u;
  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  for (const LineSegment* s : members) {
    for (Point2 p : {s->p0, s->p1}) {
      const double t = dot(p - centroid, u);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
  }
  return make_segment(centroid + tmin * u, centroid + tmax * u, width, nfa);
}

bool by_length_desc(const LineSegment& a, const LineSegment& b) { return a.length() > b.length(); }

}  // namespace

Point2 LineSegment::direction() const {
  const double len = length();
  if (len == 0.0) return {1.0, 0.0};
  return (1.0 / len) * (p1 - p0);
}

LineSegment make_segment(Point2 p0, Point2 p1, double width, double nfa_log10) {
  LineSegment s;
  s.p0 = p0;
  s.p1 = p1;
  s.width = width;
  s.angle = line_angle(p0, p1);
  s.nfa_log10 = nfa_log10;
  return s;
}

MergeParams MergeParams::scaled(double factor) const {
  MergeParams m = *this;
  m.max_offset *= factor;
  m.ridge_max_separation *= factor;
  return m;
}

std::vector<LineSegment> merge_collinear(std::span<const LineSegment> segments, double max_angle, double max_offset,
                                         bool directed) {
  const std::size_t n = segments.size();
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const LineSegment& a = segments[i];
      const LineSegment& b = segments[j];
      if (orientation_diff(a.angle, b.angle) > max_angle) continue;
      if (directed && dot(a.direction(), b.direction()) <= 0.0) continue;
      const double off = std::max(line_distance(midpoint(b), a.p0, a.p1), line_distance(midpoint(a), b.p0, b.p1));
      if (off <= max_offset) sets.unite(i, j);
    }
  }
  std::vector<LineSegment> out;
  for (std::size_t root = 0; root < n; ++root) {
    if (sets.find(root) != root) continue;
    std::vector<const LineSegment*> members;
    double width = 0.0, len = 0.0;
    for (std::size_t k = root; k < n; ++k) {
      if (sets.find(k) != root) continue;
      members.push_back(&segments[k]);
      width += segments[k].width * segments[k].length();
      len += segments[k].length();
    }
    if (members.size() == 1) {
      out.push_back(*members.front());
      continue;
    }
    out.push_back(fit_span(members, members.front()->direction(), len > 0.0 ? width / len : members.front()->width));
  }
  return out;
}

std::vector<LineSegment> pair_ridges(std::span<const LineSegment> segments, const MergeParams& params) {
  const std::size_t n = segments.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return segments[a].length() > segments[b].length(); });
  std::vector<bool> paired(n, false);
  std::vector<LineSegment> out;
  for (std::size_t oi = 0; oi < n; ++oi) {
    const std::size_t i = order[oi];
    if (paired[i]) continue;
    const LineSegment& a = segments[i];
    const Point2 u = a.direction();
    const double la = a.length();
    std::size_t best = n;
    double best_sep = std::numeric_limits<double>::infinity();
    for (std::size_t oj = oi + 1; oj < n; ++oj) {
      const std::size_t j = order[oj];
      if (paired[j]) continue;
      const LineSegment& b = segments[j];
      if (orientation_diff(a.angle, b.angle) > params.ridge_max_angle) continue;
      if (dot(u, b.direction()) >= 0.0) continue;
      const double sep =
          0.5 * (line_distance(midpoint(b), a.p0, a.p1) + line_distance(midpoint(a), b.p0, b.p1));
      if (sep > params.ridge_max_separation || sep >= best_sep) continue;
      const double tb0 = dot(b.p0 - a.p0, u);
      const double tb1 = dot(b.p1 - a.p0, u);
      const double overlap = std::min(la, std::max(tb0, tb1)) - std::max(0.0, std::min(tb0, tb1));
      if (overlap < params.ridge_min_overlap * std::min(la, b.length())) continue;
      best = j;
      best_sep = sep;
    }
    if (best == n) {
      out.push_back(a);
      continue;
    }
    paired[i] = paired[best] = true;
    const LineSegment& b = segments[best];
    // Flip b so both edges point the same way, then fit the centreline.
    const LineSegment b_rev = make_segment(b.p1, b.p0, b.width, b.nfa_log10);
    const LineSegment* members[2] = {&a, &b_rev};
    out.push_back(fit_span(members, u, best_sep + 0.5 * (a.width + b.width)));
  }
  return out;
}

std::vector<LineSegment> consolidate(std::span<const LineSegment> segments, const MergeParams& params) {
  auto edges = merge_collinear(segments, params.max_angle, params.max_offset, true);
  auto ridges = pair_ridges(edges, params);
  auto lines = merge_collinear(ridges, params.max_angle, params.max_offset, false);
  std::stable_sort(lines.begin(), lines.end(), by_length_desc);
  return lines;
}

std::vector<LineSegment> filter_min_length(std::span<const LineSegment> segments, double image_side, double ratio) {
  require(ratio >= 0.0 && ratio <= 1.0, "min_length_ratio must lie in [0, 1]");
  const double threshold = ratio * image_side;
  std::vector<LineSegment> out;
  for (const auto& s : segments) {
    if (s.length() >= threshold) out.push_back(s);
  }
  return out;
}

double default_mask_halfwidth(std::optional<double> psf_fwhm) {
  if (psf_fwhm && *psf_fwhm > 0.0) return 1.5 * *psf_fwhm;
  return 5.0;
}

TrailLine extend_to_borders(const LineSegment& seg, double width, double height, double mask_halfwidth) {
  require(seg.length() > 0.0, "cannot extend a zero-length segment");
  const auto clipped = clip_line(seg.p0, seg.p1, Rect{0.0, 0.0, width, height});
  if (!clipped) fail(ErrorCategory::kPrecondition, "segment line does not cross the image rectangle");
  TrailLine t;
  t.segment = seg;
  t.extended_p0 = clipped->first;
  t.extended_p1 = clipped->second;
  t.mask_halfwidth = mask_halfwidth;
  return t;
}

BinaryMask trail_mask(std::span<const TrailLine> lines, int width, int height) {
  BinaryMask mask(width, height);
  for (const TrailLine& t : lines) {
    require(t.mask_halfwidth >= 1.0, "mask_halfwidth must be >= 1");
    const Point2 a = t.extended_p0;
    const Point2 b = t.extended_p1;
    const Point2 d = b - a;
    const double len = norm(d);
    if (len == 0.0) continue;
    const Point2 nrm{-d.y / len, d.x / len};
    const double hw = t.mask_halfwidth;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
      const double cy = y + 0.5;
      // Candidate columns from the analytic band, padded by one pixel; the
      // exact test below decides.
      int x_lo = 0;
      int x_hi = width - 1;
      if (std::abs(nrm.x) > 1e-12) {
        const double base = nrm.y * (cy - a.y);
        double xa = a.x + (-hw - base) / nrm.x - 0.5;
        double xb = a.x + (hw - base) / nrm.x - 0.5;
        if (xa > xb) std::swap(xa, xb);
        xa = std::clamp(xa, -2.0, width + 2.0);
        xb = std::clamp(xb, -2.0, width + 2.0);
        x_lo = std::max(0, static_cast<int>(std::floor(xa)) - 1);
        x_hi = std::min(width - 1, static_cast<int>(std::ceil(xb)) + 1);
      }
      for (int x = x_lo; x <= x_hi; ++x) {
        if (line_distance({x + 0.5, cy}, a, b) <= hw) mask.set(x, y, true);
      }
    }
  }
  return mask;
}

}  // namespace trailkit::linedet
