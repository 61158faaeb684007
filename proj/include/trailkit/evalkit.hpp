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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trailkit/linedet.hpp"
#include "trailkit/pipeline.hpp"
#include "trailkit/segnet.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::eval {

struct MatchCriteria {
  double max_angle_diff = 2.0 * linedet::kDegree;
  /// Mean distance from the truth midline to the detected line, and the
  /// half-width of the band used for the overlap test.
  double max_perp_distance = 5.0;
  double min_overlap_fraction = 0.3;

  MatchCriteria scaled(double factor) const;  ///< distances scaled, angle kept
  void validate() const;
};

/// Geometry of one detection / truth pair.
struct PairGeometry {
  double angle_diff = 0.0;
  double mean_distance = 0.0;
  double overlap_fraction = 0.0;  ///< of the truth length inside the band
};

PairGeometry pair_geometry(const linedet::TrailLine& detected, const sim::TrailSpec& truth, double band_halfwidth);
bool pair_matches(const PairGeometry& g, const MatchCriteria& criteria);

struct MatchResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<std::pair<int, int>> assignment;  ///< (detected index, truth index)
};

/// Greedy one-to-one matching by ascending mean distance over admissible
/// pairs; ties go to the lower detection index, then truth index.
MatchResult match_trails(std::span<const linedet::TrailLine> detected, std::span<const sim::TrailSpec> truth,
                         const MatchCriteria& criteria);

struct DetectionReport {
  long tp = 0;
  long fp = 0;
  long fn = 0;
  std::optional<double> recall;     ///< tp / (tp + fn), absent on 0 / 0
  std::optional<double> precision;  ///< tp / (tp + fp), absent on 0 / 0
};

DetectionReport compute_report(long tp, long fp, long fn);

/// Percentage with two decimals ("79.57"), or "-" when absent.
std::string format_percent(const std::optional<double>& v);

enum class SweepAxis { kSnr, kMinLengthRatio };

struct SweepPoint {
  double value = 0.0;
  DetectionReport report;
  long trials = 0;     ///< SNR sweep: images at this value
  long detected = 0;   ///< SNR sweep: images with tp >= 1

  /// detected / trials; 0 when there were no trials.
  double rate() const { return trials > 0 ? static_cast<double>(detected) / trials : 0.0; }
};

struct SweepCurve {
  SweepAxis axis = SweepAxis::kSnr;
  std::vector<SweepPoint> points;
};

struct SnrSweepOptions {
  int tile_size = 256;
  sim::StarFieldParams field;
  MatchCriteria criteria;
  pipeline::DetectOptions detect;
  int batch_size = 8;
};

/// For every SNR value, trials_per_snr fresh single-trail tiles run through
/// pipeline::detect_tile. Trial k uses the same star field and trail
/// geometry at every SNR (only amplitude and photon noise change), so the
/// curve is a paired comparison. SNR 0 injects a zero-amplitude trail.
SweepCurve snr_sweep(const segnet::NetworkParams& net, std::span<const double> snr_values, int trials_per_snr,
                     std::uint64_t seed, const SnrSweepOptions& options = {});

/// Trails of one image at a given min-length ratio.
using TrailProducer = std::function<std::vector<linedet::TrailLine>(std::size_t image, double ratio)>;

/// Matches produce(i, r) against truth[i] for every image and ratio and
/// sums the counts. Ratios must be strictly increasing.
SweepCurve ratio_sweep(std::size_t n_images, std::span<const std::vector<sim::TrailSpec>> truth,
                       std::span<const double> ratios, const MatchCriteria& criteria, const TrailProducer& produce);

/// Single-image path: raw per-image segment lists, filtered at each ratio
/// against image_side, extended to the width x height rectangle.
SweepCurve threshold_sweep(std::span<const std::vector<linedet::LineSegment>> detections_raw,
                           std::span<const std::vector<sim::TrailSpec>> truth, std::span<const double> ratios,
                           const MatchCriteria& criteria, int width, int height, double mask_halfwidth = 5.0);

/// Frame path: re-assembles every frame from its stored tile results at each
/// ratio, with criteria scaled by the frame's tile resample factor.
SweepCurve frame_threshold_sweep(std::span<const pipeline::FrameDetection> frames,
                                 std::span<const std::vector<sim::TrailSpec>> truth, std::span<const double> ratios,
                                 const MatchCriteria& criteria, const pipeline::DetectOptions& options);

/// Linear interpolation of recall against precision between the two
/// consecutive curve points whose precisions bracket the target. Throws
/// kRange when no pair brackets it.
double interpolate_recall_at_precision(const SweepCurve& curve, double target_precision);

/// Table columns: threshold tp fp fn recall% precision%.
void write_table(std::ostream& out, const SweepCurve& curve);
void write_table(const std::filesystem::path& path, const SweepCurve& curve);
/// Curve data: "snr rate detected trials" per line.
void write_rate_curve(std::ostream& out, const SweepCurve& curve);
void write_rate_curve(const std::filesystem::path& path, const SweepCurve& curve);

/// Published min-length threshold table, ratio / TP / FP / FN.
struct PublishedRow {
  double ratio;
  long tp;
  long fp;
  long fn;
};
std::span<const PublishedRow> published_threshold_table();

}  // namespace trailkit::eval
