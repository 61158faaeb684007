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
#include <random>

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {
namespace {

constexpr double kMaskFraction = 0.1;

// Calls fn(x, y, flux) for every pixel within the trail's cutoff radius, in
// row-major order.
template <typename Fn>
void for_each_trail_pixel(const TrailSpec& spec, int width, int height, Fn&& fn) {
  if (spec.peak_amplitude <= 0.0) return;
  const double r = trail_cutoff(spec.fwhm);
  const Point2 a = spec.p0;
  const Point2 b = spec.p1;
  const Point2 d = b - a;
  const double len = norm(d);
  const int ylo = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - r)));
  const int yhi = std::min(height - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + r)));
  const double bx0 = std::min(a.x, b.x) - r;
  const double bx1 = std::max(a.x, b.x) + r;
  for (int y = ylo; y <= yhi; ++y) {
    const double yc = y + 0.5;
    double x0 = bx0;
    double x1 = bx1;
    if (std::abs(d.y) > 1e-12 * len) {
      const double xl = a.x + (yc - a.y) * d.x / d.y;
      const double half = r * len / std::abs(d.y);
      x0 = std::max(x0, xl - half);
      x1 = std::min(x1, xl + half);
    }
    const int xs = std::max(0, static_cast<int>(std::floor(x0 - 0.5)));
    const int xe = std::min(width - 1, static_cast<int>(std::ceil(x1)));
    for (int x = xs; x <= xe; ++x) {
      const double f = trail_flux_at(spec, x + 0.5, yc);
      if (f > 0.0) fn(x, y, f);
    }
  }
}

}  // namespace

double trail_flux_at(const TrailSpec& spec, double px, double py) {
  if (spec.peak_amplitude <= 0.0) return 0.0;
  const double dist = segment_distance({px, py}, spec.p0, spec.p1);
  if (dist > trail_cutoff(spec.fwhm)) return 0.0;
  const double sigma = fwhm_to_sigma(spec.fwhm);
  return spec.peak_amplitude * std::exp(-0.5 * dist * dist / (sigma * sigma));
}

Raster render_trail_flux(int width, int height, const TrailSpec& spec) {
  Raster out(width, height);
  for_each_trail_pixel(spec, width, height, [&](int x, int y, double f) { out(x, y) = static_cast<float>(f); });
  return out;
}

void add_trail(Raster& image, BinaryMask& mask, const TrailSpec& spec, std::uint64_t rng_seed, NoiseMode mode) {
  require(spec.length() > 0.0, "trail has zero length");
  require(spec.fwhm > 0.0, "trail FWHM must be positive");
  require(image.width() == mask.width() && image.height() == mask.height(), "mask does not match image");
  std::mt19937_64 rng(rng_seed);
  const double threshold = kMaskFraction * spec.peak_amplitude;
  for_each_trail_pixel(spec, image.width(), image.height(), [&](int x, int y, double f) {
    double added = f;
    if (mode == NoiseMode::kPoisson) {
      std::poisson_distribution<long> pd(f);
      added = static_cast<double>(pd(rng));
    }
    image(x, y) = static_cast<float>(image(x, y) + added);
    if (f > threshold) mask.set(x, y);
  });
}

RenderedTrail render_trail(const Raster& background, const TrailSpec& spec, std::uint64_t rng_seed, NoiseMode mode) {
  require(spec.length() > 0.0, "trail has zero length");
  require(spec.peak_amplitude >= 0.0, "trail peak must be >= 0");
  RenderedTrail out{background, BinaryMask(background.width(), background.height())};
  add_trail(out.image, out.mask, spec, rng_seed, mode);
  return out;
}

double solve_peak_for_snr(double target_snr, const TrailSpec& geometry, const NoiseModel& noise,
                          const Raster& background) {
  require(target_snr > 0.0, "target SNR must be positive");
  require(geometry.length() > 0.0, "trail has zero length");

  // Only the aperture and its sky frame matter, so work on that window.
  const ApertureSpec ap = ApertureSpec::for_fwhm(geometry.fwhm);
  const Point2 mid = geometry.midpoint();
  const int reach = ap.side / 2 + ap.sky_gap + ap.sky_thickness;
  const int cx = static_cast<int>(std::floor(mid.x));
  const int cy = static_cast<int>(std::floor(mid.y));
  const TileBox box{std::max(0, cx - reach), std::max(0, cy - reach), std::min(background.width(), cx + reach + 1),
                    std::min(background.height(), cy + reach + 1)};
  const Raster window = crop(background, box);
  TrailSpec local = geometry;
  local.p0 = geometry.p0 - Point2{static_cast<double>(box.x0), static_cast<double>(box.y0)};
  local.p1 = geometry.p1 - Point2{static_cast<double>(box.x0), static_cast<double>(box.y0)};

  auto snr_at = [&](double peak) {
    local.peak_amplitude = peak;
    Raster img = window;
    for_each_trail_pixel(local, img.width(), img.height(),
                         [&](int x, int y, double f) { img(x, y) = static_cast<float>(img(x, y) + f); });
    return compute_snr(img, local, noise);
  };

  if (snr_at(0.0) >= target_snr) {
    fail(ErrorCategory::kNumeric, "background alone already reaches the target SNR");
  }
  constexpr double kCeiling = 1e9;
  double lo = 0.0;
  double hi = 1.0;
  while (snr_at(hi) < target_snr) {
    lo = hi;
    hi *= 2.0;
    if (hi > kCeiling) fail(ErrorCategory::kNumeric, "target SNR not reachable below the amplitude ceiling");
  }
  for (int it = 0; it < 100; ++it) {
    const double mid_peak = 0.5 * (lo + hi);
    const double s = snr_at(mid_peak);
    if (std::abs(s / target_snr - 1.0) < 1e-5) return mid_peak;
    (s < target_snr ? lo : hi) = mid_peak;
  }
  return 0.5 * (lo + hi);
}

TrailSpec random_trail_geometry(int width, int height, double fwhm, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.25 * width, 0.75 * width);
  std::uniform_real_distribution<double> uy(0.25 * height, 0.75 * height);
  std::uniform_real_distribution<double> ua(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> ul(0.5, 1.5);
  const Point2 c{ux(rng), uy(rng)};
  const double angle = ua(rng);
  const double len = ul(rng) * std::hypot(width, height);
  const Point2 dir{std::cos(angle), std::sin(angle)};
  const Point2 a = c - 0.5 * len * dir;
  const Point2 b = c + 0.5 * len * dir;
  const auto clipped = clip_segment(a, b, Rect{0.0, 0.0, static_cast<double>(width), static_cast<double>(height)});
  TrailSpec spec;
  spec.p0 = clipped ? clipped->first : a;
  spec.p1 = clipped ? clipped->second : b;
  spec.fwhm = fwhm;
  return spec;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over a mix of the two inputs
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace trailkit::sim
