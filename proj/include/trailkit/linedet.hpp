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

#include <filesystem>
#include <iosfwd>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "trailkit/geometry.hpp"
#include "trailkit/raster.hpp"

namespace trailkit::linedet {

inline constexpr double kDegree = std::numbers::pi / 180.0;

struct LsdParams {
  /// Gradient magnitude threshold; <= 0 derives it from the angle tolerance
  /// as quant / sin(angle_tolerance).
  double grad_threshold = 0.0;
  double angle_tolerance = 22.5 * kDegree;
  double nfa_epsilon = 1.0;
  double min_length_ratio = 0.12;
  double scale = 0.8;
  double sigma_scale = 0.6;
  double density_threshold = 0.7;
  double quant = 2.0;
  int n_bins = 1024;
  /// Symmetric padding added before detection; results are clipped back to
  /// the image. Lets bands that cross the border run up to it.
  int border_padding = 8;

  double precision() const { return angle_tolerance / std::numbers::pi; }
  double effective_grad_threshold() const;
  void validate() const;
};

struct LineSegment {
  Point2 p0;
  Point2 p1;
  double width = 1.0;
  double angle = 0.0;  ///< orientation of p0 -> p1 folded into [0, pi)
  double nfa_log10 = 0.0;

  double length() const { return distance(p0, p1); }
  Point2 direction() const;  ///< unit vector p0 -> p1
};

LineSegment make_segment(Point2 p0, Point2 p1, double width = 1.0, double nfa_log10 = 0.0);

struct TrailLine {
  LineSegment segment;
  Point2 extended_p0;
  Point2 extended_p1;
  double mask_halfwidth = 5.0;
};

/// Line Segment Detector on a grey-level image, in continuous pixel
/// coordinates. Segments follow the level-line direction, so the two edges of
/// a bright band point in opposite directions. Sorted by decreasing length.
/// Images smaller than 8 px on a side are rejected.
std::vector<LineSegment> lsd_detect(const Raster& img, const LsdParams& params);
/// Binary input path: the mask is rendered as 0 / 255 grey levels.
std::vector<LineSegment> lsd_detect(const BinaryMask& mask, const LsdParams& params);

/// Probability map in [0, 1] scaled to [0, 255] grey levels.
Raster probability_to_grey(const Raster& prob);

struct MergeParams {
  double max_angle = 1.0 * kDegree;   ///< collinear merge: orientation difference
  double max_offset = 3.0;            ///< collinear merge: perpendicular offset, px
  double ridge_max_angle = 3.0 * kDegree;
  double ridge_max_separation = 16.0;  ///< px between the two edges of one band
  double ridge_min_overlap = 0.5;      ///< overlap along the line / shorter edge

  MergeParams scaled(double factor) const;  ///< distances scaled, angles kept
};

/// Merges segments lying on the same infinite line into one segment spanning
/// all of them. With `directed`, only segments pointing the same way merge.
std::vector<LineSegment> merge_collinear(std::span<const LineSegment> segments, double max_angle, double max_offset,
                                         bool directed);

/// Replaces each pair of antiparallel edges bounding one bright band by the
/// band's centerline.
std::vector<LineSegment> pair_ridges(std::span<const LineSegment> segments, const MergeParams& params);

/// LSD edge output to trail candidates: directed merge of edge fragments,
/// ridge pairing, then undirected collinear merge. Sorted by decreasing length.
std::vector<LineSegment> consolidate(std::span<const LineSegment> segments, const MergeParams& params);

/// Keeps segments with length >= ratio * image_side, order preserved.
std::vector<LineSegment> filter_min_length(std::span<const LineSegment> segments, double image_side, double ratio);

/// 3 x FWHM / 2 when the PSF width is known, else 5 px.
double default_mask_halfwidth(std::optional<double> psf_fwhm);

/// Extends the segment's infinite line to the image rectangle [0,w] x [0,h].
/// Throws kPrecondition when the line misses the rectangle.
TrailLine extend_to_borders(const LineSegment& seg, double width, double height, double mask_halfwidth = 5.0);

/// Pixels whose centre lies within mask_halfwidth of any extended line.
BinaryMask trail_mask(std::span<const TrailLine> lines, int width, int height);

/// Standard (rho, theta) Hough transform over the set pixels of the mask.
/// Peaks are 3x3 local maxima with at least vote_threshold votes; each line
/// is clipped to the bounding box of the set pixels.
std::vector<LineSegment> hough_detect(const BinaryMask& mask, int angle_bins, int rho_bins, int vote_threshold);

/// Plain text, one segment per line: x0 y0 x1 y1 width nfa_log10.
void write_segments(std::ostream& out, std::span<const LineSegment> segments);
void write_segments(const std::filesystem::path& path, std::span<const LineSegment> segments);
std::vector<LineSegment> read_segments(std::istream& in);
std::vector<LineSegment> read_segments(const std::filesystem::path& path);

}  // namespace trailkit::linedet
