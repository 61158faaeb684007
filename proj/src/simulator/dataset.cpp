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
#include <exception>
#include <numeric>
#include <random>

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {
namespace {

// Largest-remainder apportionment of n items over the given weights.
std::vector<int> apportion(std::span<const double> weights, int n) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size());
  std::vector<std::pair<double, std::size_t>> rema;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = n * weights[i] / total;
    counts[i] = static_cast<int>(std::floor(exact));
    assigned += counts[i];
    rema.push_back({exact - counts[i], i});
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[rema[k % rema.size()].second];
  return counts;
}

// Stratified SNR targets: bin occupancy follows the weights exactly, values
// are uniform within each bin, order is shuffled.
std::vector<double> snr_targets(const DatasetOptions& opt, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto counts = apportion(opt.snr_weights, n);
  const double width = (opt.snr_high - opt.snr_low) / static_cast<double>(opt.snr_weights.size());
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::size_t b = 0; b < counts.size(); ++b) {
    std::uniform_real_distribution<double> u(opt.snr_low + b * width, opt.snr_low + (b + 1) * width);
    for (int k = 0; k < counts[b]; ++k) out.push_back(u(rng));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

double background_fwhm(const Raster& bg) {
  try {
    const auto stars = find_star_candidates(bg, 40);
    return fit_psf(bg, stars).fwhm();
  } catch (const Error&) {
    const auto it = bg.meta().find("PSF_FWHM");
    if (it == bg.meta().end()) throw;
    return std::stod(it->second);
  }
}

}  // namespace

std::string to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation") return Split::kValidation;
  if (s == "test") return Split::kTest;
  fail(ErrorCategory::kFormat, "unknown split '" + s + "'");
}

std::size_t DatasetManifest::count(Split s) const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [s](const DatasetEntry& e) { return e.split == s; }));
}

GeneratedDataset generate_dataset(std::span<const Raster> backgrounds, const DatasetOptions& opt) {
  require(opt.count >= 1, "dataset count must be >= 1");
  require(opt.snr_low > 0.0 && opt.snr_high <= 100.0 && opt.snr_low < opt.snr_high, "SNR range must lie in (0, 100]");
  require(!opt.snr_weights.empty(), "SNR weights must be non-empty");
  require(opt.split_ratio > 0.0 && opt.split_ratio <= 1.0, "split ratio must lie in (0, 1]");
  require(!opt.bins.empty(), "bin list must be non-empty");
  if (backgrounds.size() < 2) {
    fail(ErrorCategory::kPrecondition, "need at least two background images to keep train and validation disjoint");
  }
  opt.noise.validate();

  const int n_train = static_cast<int>(std::ceil(opt.count * opt.split_ratio - 1e-9));
  const int n_val = opt.count - n_train;
  const std::size_t n_bg = backgrounds.size();
  const std::size_t n_bg_train =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(n_bg * opt.split_ratio)), 1, n_bg - 1);

  std::vector<double> fwhm(n_bg);
  for (std::size_t i = 0; i < n_bg; ++i) fwhm[i] = background_fwhm(backgrounds[i]);

  const auto train_snr = snr_targets(opt, n_train, derive_seed(opt.seed, 0xA11CE));
  const auto val_snr = snr_targets(opt, n_val, derive_seed(opt.seed, 0xB0B));

  GeneratedDataset ds;
  ds.manifest.seed = opt.seed;
  ds.manifest.entries.resize(static_cast<std::size_t>(opt.count));
  ds.samples.resize(static_cast<std::size_t>(opt.count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(opt.count));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < opt.count; ++i) {
    try {
      const bool train = i < n_train;
      DatasetEntry& e = ds.manifest.entries[static_cast<std::size_t>(i)];
      e.split = train ? Split::kTrain : Split::kValidation;
      e.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(i) + 1);
      std::mt19937_64 rng(e.seed);
      const double target = train ? train_snr[static_cast<std::size_t>(i)] : val_snr[static_cast<std::size_t>(i - n_train)];

      const std::size_t pool_lo = train ? 0 : n_bg_train;
      const std::size_t pool_n = train ? n_bg_train : n_bg - n_bg_train;
      e.background_index = static_cast<int>(pool_lo + std::uniform_int_distribution<std::size_t>(0, pool_n - 1)(rng));
      const Raster& bg = backgrounds[static_cast<std::size_t>(e.background_index)];

      int bin = opt.bins[std::uniform_int_distribution<std::size_t>(0, opt.bins.size() - 1)(rng)];
      while (bin > 1 && (opt.tile_size * bin > bg.width() || opt.tile_size * bin > bg.height())) bin /= 2;
      require(opt.tile_size <= bg.width() && opt.tile_size <= bg.height(), "background smaller than a tile");
      e.bin = bin;
      const int native = opt.tile_size * bin;
      const int ox = std::uniform_int_distribution<int>(0, bg.width() - native)(rng);
      const int oy = std::uniform_int_distribution<int>(0, bg.height() - native)(rng);
      const Raster window = crop(bg, TileBox{ox, oy, ox + native, oy + native});

      TrailSpec spec;
      for (int attempt = 0;; ++attempt) {
        spec = random_trail_geometry(native, native, fwhm[static_cast<std::size_t>(e.background_index)], rng());
        spec.target_snr = target;
        try {
          spec.peak_amplitude = solve_peak_for_snr(target, spec, opt.noise, window);
          break;
        } catch (const Error&) {
          // A bright star under the aperture, or an aperture clipped by the
          // border, makes the target unmeasurable; draw another line.
          if (attempt >= 50) throw;
        }
      }
      RenderedTrail rendered = render_trail(window, spec, rng(), NoiseMode::kPoisson);
      TrailRecord rec{spec, compute_snr(rendered.image, spec, opt.noise)};

      Sample& s = ds.samples[static_cast<std::size_t>(i)];
      if (bin == 1) {
        s.image = std::move(rendered.image);
        s.mask = std::move(rendered.mask);
      } else {
        s.image = resample(rendered.image, opt.tile_size, opt.tile_size);
        const Raster flux = resample(render_trail_flux(native, native, spec), opt.tile_size, opt.tile_size);
        float peak = 0.0f;
        for (float v : flux.pixels()) peak = std::max(peak, v);
        s.mask = BinaryMask(opt.tile_size, opt.tile_size);
        auto bits = s.mask.bits();
        auto fp = flux.pixels();
        for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = fp[k] > 0.1f * peak ? 1 : 0;
        const double inv = 1.0 / bin;
        rec.spec.p0 = inv * spec.p0;
        rec.spec.p1 = inv * spec.p1;
        rec.spec.fwhm = spec.fwhm * inv;
      }
      s.image.meta()["BIN"] = std::to_string(bin);
      e.trails = {rec};
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& ep : errors) {
    if (ep) std::rethrow_exception(ep);
  }
  return ds;
}

std::pair<DatasetEntry, Sample> make_field_frame(const FieldOptions& opt, std::uint64_t seed) {
  require(opt.min_trails >= 0 && opt.max_trails >= opt.min_trails, "bad trail count range");
  require(opt.snr_low > 0.0 && opt.snr_low < opt.snr_high && !opt.snr_weights.empty(), "bad SNR range");
  std::mt19937_64 rng(seed);
  DatasetEntry e;
  e.split = Split::kTest;
  e.seed = seed;
  Sample s{make_star_field(opt.width, opt.height, opt.field, derive_seed(seed, 0)),
           BinaryMask(opt.width, opt.height)};
  const Raster background = s.image;
  const double fwhm = opt.field.psf.fwhm();
  const int n = std::uniform_int_distribution<int>(opt.min_trails, opt.max_trails)(rng);
  std::discrete_distribution<std::size_t> pick_bin(opt.snr_weights.begin(), opt.snr_weights.end());
  const double bin_width = (opt.snr_high - opt.snr_low) / static_cast<double>(opt.snr_weights.size());
  std::vector<TrailSpec> specs;
  for (int k = 0; k < n; ++k) {
    const std::size_t b = pick_bin(rng);
    const double target =
        std::uniform_real_distribution<double>(opt.snr_low + b * bin_width, opt.snr_low + (b + 1) * bin_width)(rng);
    TrailSpec spec;
    for (int attempt = 0;; ++attempt) {
      spec = random_trail_geometry(opt.width, opt.height, fwhm, rng());
      spec.target_snr = target;
      try {
        spec.peak_amplitude = solve_peak_for_snr(target, spec, opt.field.noise, background);
        break;
      } catch (const Error&) {
        if (attempt >= 50) throw;
      }
    }
    add_trail(s.image, s.mask, spec, rng(), NoiseMode::kPoisson);
    specs.push_back(spec);
  }
  for (const TrailSpec& spec : specs) e.trails.push_back({spec, compute_snr(s.image, spec, opt.field.noise)});
  return {std::move(e), std::move(s)};
}

GeneratedDataset generate_field_set(const FieldOptions& opt, int count, std::uint64_t seed) {
  require(count >= 1, "frame count must be >= 1");
  GeneratedDataset ds;
  ds.manifest.seed = seed;
  for (int i = 0; i < count; ++i) {
    auto [e, s] = make_field_frame(opt, derive_seed(seed, static_cast<std::uint64_t>(i) + 1));
    ds.manifest.entries.push_back(std::move(e));
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace trailkit::sim
