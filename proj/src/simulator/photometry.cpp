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

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {

void NoiseModel::validate() const {
  const double fields[] = {sky_electrons_per_px, exposure_s, dark_current, readout_noise, gain, quant_var};
  for (double f : fields) {
    if (!(f >= 0.0) || !std::isfinite(f)) fail(ErrorCategory::kConfig, "noise model fields must be finite and >= 0");
  }
  if (std::abs(quant_var - 1.0 / 12.0) > 1e-3) {
    fail(ErrorCategory::kConfig, "quantisation variance must be 1/12 to within 1e-3");
  }
}

ApertureSpec ApertureSpec::for_fwhm(double fwhm) {
  require(fwhm > 0.0, "aperture needs a positive FWHM");
  ApertureSpec a;
  a.side = std::max(1, 2 * static_cast<int>(std::lround((3.0 * fwhm - 1.0) / 2.0)) + 1);
  a.sky_gap = std::max(1, static_cast<int>(std::lround(2.0 * fwhm)));
  const int inner = a.side + 2 * a.sky_gap;
  const int outer = inner + 2 * a.sky_thickness;
  a.n_signal_px = a.side * a.side;
  a.n_sky_px = outer * outer - inner * inner;
  return a;
}

double snr_equation(double signal_electrons, double n_signal_px, double n_sky_px, const NoiseModel& noise) {
  require(signal_electrons >= 0.0, "signal electrons must be >= 0");
  require(n_signal_px > 0.0 && n_sky_px > 0.0, "pixel counts must be positive");
  const double per_pixel = noise.sky_electrons_per_px + noise.exposure_s * noise.dark_current +
                           noise.readout_noise * noise.readout_noise + noise.gain * noise.gain * noise.quant_var;
  if (per_pixel == 0.0 && signal_electrons > 0.0) return std::sqrt(signal_electrons);
  const double variance = signal_electrons + n_signal_px * (1.0 + n_signal_px / n_sky_px) * per_pixel;
  if (variance <= 0.0) fail(ErrorCategory::kNumeric, "SNR denominator is zero");
  return signal_electrons / std::sqrt(variance);
}

double compute_snr(const Raster& img, const TrailSpec& spec, const NoiseModel& noise) {
  const ApertureSpec ap = ApertureSpec::for_fwhm(spec.fwhm);
  const Point2 mid = spec.midpoint();
  const int cx = static_cast<int>(std::floor(mid.x));
  const int cy = static_cast<int>(std::floor(mid.y));
  const int half = ap.side / 2;
  if (cx - half < 0 || cy - half < 0 || cx + half >= img.width() || cy + half >= img.height()) {
    fail(ErrorCategory::kPrecondition, "SNR aperture falls outside the image");
  }
  double aperture_sum = 0.0;
  for (int y = cy - half; y <= cy + half; ++y) {
    for (int x = cx - half; x <= cx + half; ++x) aperture_sum += img(x, y);
  }

  const int inner_half = half + ap.sky_gap;
  const int outer_half = inner_half + ap.sky_thickness;
  std::vector<float> sky;
  sky.reserve(static_cast<std::size_t>(ap.n_sky_px));
  for (int y = cy - outer_half; y <= cy + outer_half; ++y) {
    if (y < 0 || y >= img.height()) continue;
    for (int x = cx - outer_half; x <= cx + outer_half; ++x) {
      if (x < 0 || x >= img.width()) continue;
      if (std::abs(x - cx) <= inner_half && std::abs(y - cy) <= inner_half) continue;
      sky.push_back(img(x, y));
    }
  }
  if (sky.empty()) fail(ErrorCategory::kPrecondition, "SNR sky frame has no pixels inside the image");
  auto mid_it = sky.begin() + static_cast<std::ptrdiff_t>(sky.size() / 2);
  std::nth_element(sky.begin(), mid_it, sky.end());
  double sky_level = *mid_it;
  if (sky.size() % 2 == 0) {
    const double lower = *std::max_element(sky.begin(), mid_it);
    sky_level = 0.5 * (sky_level + lower);
  }
  const double signal = std::max(0.0, aperture_sum - ap.n_signal_px * sky_level);
  return snr_equation(signal, ap.n_signal_px, static_cast<double>(sky.size()), noise);
}

}  // namespace trailkit::sim
