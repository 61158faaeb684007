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
#include <exception>

#include "trailkit/error.hpp"
#include "trailkit/evalkit.hpp"

namespace trailkit::eval {
namespace {

void require_increasing(std::span<const double> values, const char* what) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    require(values[i] > values[i - 1], std::string(what) + " must be strictly increasing");
  }
}

struct Trial {
  Raster background;
  sim::TrailSpec geometry;
  std::vector<double> peaks;  ///< per SNR value
};

// Draws star field and trail until every requested SNR is reachable; a
// bright star under the aperture can make low targets unmeasurable.
Trial make_trial(std::uint64_t trial_seed, std::span<const double> snr_values, const SnrSweepOptions& opt) {
  const double fwhm = opt.field.psf.fwhm();
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t s = sim::derive_seed(trial_seed, attempt);
    Trial t;
    t.background = sim::make_star_field(opt.tile_size, opt.tile_size, opt.field, sim::derive_seed(s, 1));
    t.geometry = sim::random_trail_geometry(opt.tile_size, opt.tile_size, fwhm, sim::derive_seed(s, 2));
    try {
      for (double snr : snr_values) {
        t.peaks.push_back(snr > 0.0 ? sim::solve_peak_for_snr(snr, t.geometry, opt.field.noise, t.background) : 0.0);
      }
      return t;
    } catch (const Error&) {
      if (attempt >= 50) throw;
    }
  }
}

}  // namespace

SweepCurve snr_sweep(const segnet::NetworkParams& net, std::span<const double> snr_values, int trials_per_snr,
                     std::uint64_t seed, const SnrSweepOptions& opt) {
  require(trials_per_snr >= 1, "trials_per_snr must be >= 1");
  require(opt.batch_size >= 1, "batch size must be >= 1");
  require(opt.tile_size == net.config.input_size, "sweep tile size must equal the network input size");
  require_increasing(snr_values, "SNR values");
  opt.criteria.validate();
  opt.detect.validate();

  const auto n = static_cast<std::size_t>(trials_per_snr);
  std::vector<Trial> trials(n);
  std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t k = 0; k < n; ++k) {
    try {
      trials[k] = make_trial(sim::derive_seed(seed, k), snr_values, opt);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepCurve curve{SweepAxis::kSnr, {}};
  for (std::size_t j = 0; j < snr_values.size(); ++j) {
    SweepPoint point;
    point.value = snr_values[j];
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t k0 = 0; k0 < n; k0 += static_cast<std::size_t>(opt.batch_size)) {
      const std::size_t kn = std::min(n, k0 + static_cast<std::size_t>(opt.batch_size));
      std::vector<Raster> tiles(kn - k0);
      for (std::size_t k = k0; k < kn; ++k) {
        sim::TrailSpec spec = trials[k].geometry;
        spec.peak_amplitude = trials[k].peaks[j];
        spec.target_snr = snr_values[j];
        const std::uint64_t noise_seed = sim::derive_seed(sim::derive_seed(seed, k), 1000 + j);
        tiles[k - k0] = sim::render_trail(trials[k].background, spec, noise_seed).image;
      }
      const auto probs = segnet::segment_batch(net, tiles);
      std::vector<MatchResult> results(kn - k0);
#pragma omp parallel for schedule(dynamic)
      for (std::size_t k = k0; k < kn; ++k) {
        const auto trails = pipeline::tile_trails(probs[k - k0], opt.detect, opt.field.psf.fwhm());
        results[k - k0] = match_trails(trails, std::span<const sim::TrailSpec>(&trials[k].geometry, 1), opt.criteria);
      }
      for (const MatchResult& r : results) {
        tp += r.tp;
        fp += r.fp;
        fn += r.fn;
        point.detected += r.tp >= 1 ? 1 : 0;
        ++point.trials;
      }
    }
    point.report = compute_report(tp, fp, fn);
    curve.points.push_back(point);
  }
  return curve;
}

SweepCurve ratio_sweep(std::size_t n_images, std::span<const std::vector<sim::TrailSpec>> truth,
                       std::span<const double> ratios, const MatchCriteria& criteria, const TrailProducer& produce) {
  require(truth.size() == n_images, "one truth list per image is required");
  require_increasing(ratios, "ratios");
  criteria.validate();
  SweepCurve curve{SweepAxis::kMinLengthRatio, {}};
  for (double ratio : ratios) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < n_images; ++i) {
      const auto trails = produce(i, ratio);
      const MatchResult r = match_trails(trails, truth[i], criteria);
      tp += r.tp;
      fp += r.fp;
      fn += r.fn;
    }
    SweepPoint p;
    p.value = ratio;
    p.trials = static_cast<long>(n_images);
    p.report = compute_report(tp, fp, fn);
    curve.points.push_back(p);
  }
  return curve;
}

SweepCurve threshold_sweep(std::span<const std::vector<linedet::LineSegment>> detections_raw,
                           std::span<const std::vector<sim::TrailSpec>> truth, std::span<const double> ratios,
                           const MatchCriteria& criteria, int width, int height, double mask_halfwidth) {
  require(width > 0 && height > 0, "image dimensions must be positive");
  const double side = std::max(width, height);
  return ratio_sweep(detections_raw.size(), truth, ratios, criteria, [&](std::size_t i, double ratio) {
    std::vector<linedet::TrailLine> out;
    for (const auto& s : linedet::filter_min_length(detections_raw[i], side, ratio)) {
      if (s.length() > 0.0) out.push_back(linedet::extend_to_borders(s, width, height, mask_halfwidth));
    }
    return out;
  });
}

SweepCurve frame_threshold_sweep(std::span<const pipeline::FrameDetection> frames,
                                 std::span<const std::vector<sim::TrailSpec>> truth, std::span<const double> ratios,
                                 const MatchCriteria& criteria, const pipeline::DetectOptions& options) {
  require(truth.size() == frames.size(), "one truth list per frame is required");
  require_increasing(ratios, "ratios");
  SweepCurve curve{SweepAxis::kMinLengthRatio, {}};
  for (double ratio : ratios) {
    pipeline::DetectOptions opt = options;
    opt.lsd.min_length_ratio = ratio;
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      pipeline::FrameDetection det;
      det.width = frames[i].width;
      det.height = frames[i].height;
      det.tile_size = frames[i].tile_size;
      det.tile_results = frames[i].tile_results;
      pipeline::assemble(det, opt, std::nullopt, false);
      double scale = 1.0;
      for (const auto& t : det.tile_results) scale = std::max(scale, pipeline::tile_scale(t.box, det.tile_size));
      const MatchResult r = match_trails(det.merged_trails, truth[i], criteria.scaled(scale));
      tp += r.tp;
      fp += r.fp;
      fn += r.fn;
    }
    SweepPoint p;
    p.value = ratio;
    p.trials = static_cast<long>(frames.size());
    p.report = compute_report(tp, fp, fn);
    curve.points.push_back(p);
  }
  return curve;
}

}  // namespace trailkit::eval
