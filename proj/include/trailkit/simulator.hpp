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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trailkit/geometry.hpp"
#include "trailkit/raster.hpp"

namespace trailkit::sim {

/// FWHM = 2 sqrt(2 ln 2) sigma for a Gaussian.
inline const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

inline double fwhm_to_sigma(double fwhm) { return fwhm / kFwhmPerSigma; }
inline double sigma_to_fwhm(double sigma) { return sigma * kFwhmPerSigma; }

struct PsfModel {
  double fwhm_x = 3.5;
  double fwhm_y = 3.5;
  double theta = 0.0;  ///< radians, orientation of the x axis of the ellipse

  /// Geometric-mean width, used for trail cross-sections and apertures.
  double fwhm() const { return std::sqrt(fwhm_x * fwhm_y); }
};

/// Detector parameters of the aperture SNR equation. Units: electrons,
/// seconds, electrons per ADU.
struct NoiseModel {
  double sky_electrons_per_px = 200.0;
  double exposure_s = 60.0;
  double dark_current = 0.01;  ///< e-/s/px
  double readout_noise = 2.0;  ///< e- RMS
  double gain = 1.0;           ///< e-/ADU
  double quant_var = 0.083;    ///< variance of a uniform [-1/2, 1/2] quantisation error

  void validate() const;
};

struct TrailSpec {
  Point2 p0;
  Point2 p1;
  double fwhm = 3.5;
  double peak_amplitude = 0.0;  ///< electrons at the trail midline
  double target_snr = 0.0;

  double length() const { return distance(p0, p1); }
  Point2 midpoint() const { return 0.5 * (p0 + p1); }
};

/// Square photometry aperture of side 3 x FWHM (nearest odd integer) and the
/// square sky frame around it: 2 px thick, starting 2 x FWHM outside.
struct ApertureSpec {
  int side = 0;
  int sky_gap = 0;
  int sky_thickness = 2;
  int n_signal_px = 0;
  int n_sky_px = 0;

  static ApertureSpec for_fwhm(double fwhm);
};

/// Aperture SNR equation: S / sqrt(S + n_p (1 + n_p/n_s) (S_S + t dc + R^2 + G^2 sigma_f^2)).
double snr_equation(double signal_electrons, double n_signal_px, double n_sky_px, const NoiseModel& noise);

/// Aperture photometry of a trail in `img`: signal is the aperture sum minus
/// n_p times the median of the sky frame, measured at the trail midpoint.
/// Negative signal clamps to zero.
double compute_snr(const Raster& img, const TrailSpec& spec, const NoiseModel& noise);

// ---------------------------------------------------------------------------
// PSF characterisation

std::vector<Point2> find_star_candidates(const Raster& img, std::size_t max_count, double min_sigma = 5.0);

/// Per-star elliptical 2-D Gaussian fits; returns the median widths. Stars
/// whose residual RMS exceeds 20% of their fitted peak are discarded.
PsfModel fit_psf(const Raster& img, std::span<const Point2> star_candidates);

// ---------------------------------------------------------------------------
// Rendering

enum class NoiseMode { kPoisson, kNone };

/// Noiseless trail flux at a pixel center, Gaussian in the distance to the
/// segment.
double trail_flux_at(const TrailSpec& spec, double px, double py);

/// Influence radius of a trail; pixels farther than this are never touched.
inline double trail_cutoff(double fwhm) { return 3.0 * fwhm; }

/// Dense noiseless flux image of one trail.
Raster render_trail_flux(int width, int height, const TrailSpec& spec);

struct RenderedTrail {
  Raster image;
  BinaryMask mask;
};

/// background + trail flux (Poisson-realised unless mode == kNone). The mask
/// marks noiseless flux above 10% of the peak.
RenderedTrail render_trail(const Raster& background, const TrailSpec& spec, std::uint64_t rng_seed,
                           NoiseMode mode = NoiseMode::kPoisson);

/// In-place variant for large frames; ORs the trail into `mask`.
void add_trail(Raster& image, BinaryMask& mask, const TrailSpec& spec, std::uint64_t rng_seed, NoiseMode mode);

/// Peak amplitude whose noiseless rendering onto `background` measures
/// `target_snr` (within 2%), by bisection on the monotone SNR(peak) curve.
/// Throws kNumeric when the target cannot be bracketed.
double solve_peak_for_snr(double target_snr, const TrailSpec& geometry, const NoiseModel& noise,
                          const Raster& background);

struct StarFieldParams {
  PsfModel psf;
  NoiseModel noise;
  double stars_per_megapixel = 400.0;
  double min_star_flux = 2.0e3;  ///< electrons
  double max_star_flux = 2.0e6;
  NoiseMode mode = NoiseMode::kPoisson;
};

/// Flat sky + dark current + Gaussian stars with a power-law flux function,
/// Poisson-realised with Gaussian readout noise, clamped at zero.
Raster make_star_field(int width, int height, const StarFieldParams& params, std::uint64_t seed);

/// `count` star fields; field k is seeded with derive_seed(seed, k).
std::vector<Raster> make_backgrounds(int count, int width, int height, const StarFieldParams& params,
                                     std::uint64_t seed);

/// Random straight trail through a width x height image: center in the
/// middle half, angle uniform on [0, pi), length uniform on [0.5, 1.5] x the
/// diagonal, clipped to the image.
TrailSpec random_trail_geometry(int width, int height, double fwhm, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Datasets

enum class Split { kTrain, kValidation, kTest };
std::string to_string(Split s);
Split parse_split(const std::string& s);

struct TrailRecord {
  TrailSpec spec;
  double realized_snr = 0.0;
};

struct DatasetEntry {
  std::string image_path;  ///< relative to the manifest directory
  std::string mask_path;
  std::vector<TrailRecord> trails;
  Split split = Split::kTrain;
  std::uint64_t seed = 0;
  int background_index = 0;
  int bin = 1;  ///< native pixels per tile pixel along each axis
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  std::uint64_t seed = 0;

  std::size_t count(Split s) const;
};

struct Sample {
  Raster image;
  BinaryMask mask;
};

struct DatasetOptions {
  int count = 375;
  double snr_low = 2.0;
  double snr_high = 30.0;
  /// Relative weights of equal-width SNR bins over [snr_low, snr_high].
  std::vector<double> snr_weights = {0.26, 0.2, 0.15, 0.12, 0.1, 0.09, 0.08};
  double split_ratio = 0.8;
  std::uint64_t seed = 1;
  int tile_size = 256;
  /// Native-pixel binning factors drawn per entry; tiles are cut at
  /// tile_size * bin and area-resampled down to tile_size.
  std::vector<int> bins = {1, 1, 2, 4, 8};
  NoiseModel noise;
};

struct GeneratedDataset {
  DatasetManifest manifest;
  std::vector<Sample> samples;  ///< parallel to manifest.entries
};

/// Every entry derives its RNG stream from (seed, index), so results do not
/// depend on the number of worker threads.
GeneratedDataset generate_dataset(std::span<const Raster> backgrounds, const DatasetOptions& options);

/// Full-frame test images with several trails each.
struct FieldOptions {
  int width = 9576;
  int height = 6388;
  int min_trails = 0;
  int max_trails = 3;
  double snr_low = 2.0;
  double snr_high = 30.0;
  std::vector<double> snr_weights = {0.26, 0.2, 0.15, 0.12, 0.1, 0.09, 0.08};
  StarFieldParams field;
};

/// One frame: star field plus a uniform number of trails in
/// [min_trails, max_trails], SNRs drawn from the weighted bins. Split is
/// kTest, bin 1, paths empty.
std::pair<DatasetEntry, Sample> make_field_frame(const FieldOptions& options, std::uint64_t seed);

/// `count` frames, frame i seeded with derive_seed(seed, i + 1).
GeneratedDataset generate_field_set(const FieldOptions& options, int count, std::uint64_t seed);

/// Deterministic per-entry stream seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Writes images (flat-binary), masks and manifest.txt into `dir`, filling
/// in the relative paths of every entry.
void write_dataset(GeneratedDataset& dataset, const std::filesystem::path& dir);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Loads image and mask of one entry, resolving paths against `root`.
Sample load_sample(const DatasetEntry& entry, const std::filesystem::path& root);

}  // namespace trailkit::sim
