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
#include <sstream>

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {
namespace {

void add_star(Raster& img, Point2 c, double flux, const PsfModel& psf) {
  const double sx = fwhm_to_sigma(psf.fwhm_x);
  const double sy = fwhm_to_sigma(psf.fwhm_y);
  const double amp = flux / (2.0 * std::numbers::pi * sx * sy);
  const double ct = std::cos(psf.theta);
  const double st = std::sin(psf.theta);
  const double r = 4.0 * std::max(psf.fwhm_x, psf.fwhm_y);
  const int x0 = std::max(0, static_cast<int>(std::floor(c.x - r)));
  const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(c.x + r)));
  const int y0 = std::max(0, static_cast<int>(std::floor(c.y - r)));
  const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(c.y + r)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x + 0.5 - c.x;
      const double dy = y + 0.5 - c.y;
      const double u = ct * dx + st * dy;
      const double v = -st * dx + ct * dy;
      img(x, y) = static_cast<float>(img(x, y) + amp * std::exp(-0.5 * (u * u / (sx * sx) + v * v / (sy * sy))));
    }
  }
}

}  // namespace

Raster make_star_field(int width, int height, const StarFieldParams& params, std::uint64_t seed) {
  params.noise.validate();
  require(params.psf.fwhm_x > 0.0 && params.psf.fwhm_y > 0.0, "PSF widths must be positive");
  require(params.min_star_flux > 0.0 && params.max_star_flux >= params.min_star_flux, "bad star flux range");

  const NoiseModel& nm = params.noise;
  const float base = static_cast<float>(nm.sky_electrons_per_px + nm.exposure_s * nm.dark_current);
  Raster img(width, height, base);

  std::mt19937_64 rng(derive_seed(seed, 0));
  const double area_mpx = static_cast<double>(width) * height / 1.0e6;
  std::poisson_distribution<long> n_stars_dist(params.stars_per_megapixel * area_mpx);
  const long n_stars = n_stars_dist(rng);
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::uniform_real_distribution<double> uu(0.0, 1.0);
  const double inv_lo = 1.0 / params.min_star_flux;
  const double inv_hi = 1.0 / params.max_star_flux;
  for (long i = 0; i < n_stars; ++i) {
    const Point2 c{ux(rng), uy(rng)};
    const double flux = 1.0 / (inv_lo - uu(rng) * (inv_lo - inv_hi));  // dN/dF ~ F^-2
    add_star(img, c, flux, params.psf);
  }

  if (params.mode == NoiseMode::kPoisson) {
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
      std::mt19937_64 row_rng(derive_seed(seed, static_cast<std::uint64_t>(y) + 1));
      std::poisson_distribution<long> sky_dist(base);
      std::normal_distribution<double> read_dist(0.0, nm.readout_noise > 0.0 ? nm.readout_noise : 1.0);
      for (int x = 0; x < width; ++x) {
        const float m = img(x, y);
        double v;
        if (m == base) {
          v = static_cast<double>(sky_dist(row_rng));
        } else {
          std::poisson_distribution<long> pd(m);
          v = static_cast<double>(pd(row_rng));
        }
        if (nm.readout_noise > 0.0) v += read_dist(row_rng);
        img(x, y) = static_cast<float>(std::max(0.0, v));
      }
    }
  }

  std::ostringstream fwhm;
  fwhm << params.psf.fwhm();
  img.meta()["PSF_FWHM"] = fwhm.str();
  img.meta()["SKY"] = std::to_string(nm.sky_electrons_per_px);
  img.meta()["EXPTIME"] = std::to_string(nm.exposure_s);
  img.meta()["SEED"] = std::to_string(seed);
  return img;
}

std::vector<Raster> make_backgrounds(int count, int width, int height, const StarFieldParams& params,
                                     std::uint64_t seed) {
  require(count >= 1, "background count must be >= 1");
  std::vector<Raster> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    out.push_back(make_star_field(width, height, params, derive_seed(seed, static_cast<std::uint64_t>(k))));
  }
  return out;
}

}  // namespace trailkit::sim
