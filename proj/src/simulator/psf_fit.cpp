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

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {
namespace {

constexpr int kStampHalf = 8;

struct RobustStats {
  double median = 0.0;
  double sigma = 0.0;
};

double median_of(std::vector<float> v) {
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Median and MAD-based sigma over a strided subsample of the image.
RobustStats robust_stats(const Raster& img) {
  const std::size_t n = img.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 200000);
  std::vector<float> sample;
  sample.reserve(n / stride + 1);
  auto px = img.pixels();
  for (std::size_t i = 0; i < n; i += stride) sample.push_back(px[i]);
  RobustStats s;
  s.median = median_of(sample);
  for (float& v : sample) v = static_cast<float>(std::abs(v - s.median));
  s.sigma = 1.4826 * median_of(std::move(sample));
  return s;
}

using Params = std::array<double, 7>;  // amp, x0, y0, sx, sy, theta, bg

double model(const Params& p, double x, double y) {
  const double ct = std::cos(p[5]);
  const double st = std::sin(p[5]);
  const double dx = x - p[1];
  const double dy = y - p[2];
  const double u = ct * dx + st * dy;
  const double v = -st * dx + ct * dy;
  return p[6] + p[0] * std::exp(-0.5 * (u * u / (p[3] * p[3]) + v * v / (p[4] * p[4])));
}

struct StarFit {
  Params params;
  double residual_rms;
};

std::optional<StarFit> fit_star(const Raster& img, int cx, int cy) {
  if (cx - kStampHalf < 0 || cy - kStampHalf < 0 || cx + kStampHalf >= img.width() ||
      cy + kStampHalf >= img.height()) {
    return std::nullopt;
  }
  const int side = 2 * kStampHalf + 1;
  const int n = side * side;
  Eigen::VectorXd xs(n), ys(n), zs(n);
  std::vector<float> border;
  for (int j = 0, k = 0; j < side; ++j) {
    for (int i = 0; i < side; ++i, ++k) {
      const int x = cx - kStampHalf + i;
      const int y = cy - kStampHalf + j;
      xs[k] = x + 0.5;
      ys[k] = y + 0.5;
      zs[k] = img(x, y);
      if (i == 0 || j == 0 || i == side - 1 || j == side - 1) border.push_back(img(x, y));
    }
  }
  Params p{};
  p[6] = median_of(border);
  p[0] = img(cx, cy) - p[6];
  p[1] = cx + 0.5;
  p[2] = cy + 0.5;
  p[3] = p[4] = 1.5;
  p[5] = 0.0;
  if (p[0] <= 0.0) return std::nullopt;

  auto residuals = [&](const Params& q) {
    Eigen::VectorXd r(n);
    for (int k = 0; k < n; ++k) r[k] = model(q, xs[k], ys[k]) - zs[k];
    return r;
  };
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXd J(n, 7);
    for (int c = 0; c < 7; ++c) {
      const double h = 1e-6 * std::max(1.0, std::abs(p[c]));
      Params qp = p, qm = p;
      qp[c] += h;
      qm[c] -= h;
      J.col(c) = (residuals(qp) - residuals(qm)) / (2.0 * h);
    }
    const Eigen::MatrixXd H = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 10 && !improved; ++tries) {
      Eigen::MatrixXd A = H;
      for (int c = 0; c < 7; ++c) A(c, c) += lambda * std::max(H(c, c), 1e-12);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      Params q = p;
      for (int c = 0; c < 7; ++c) q[c] += step[c];
      q[3] = std::max(std::abs(q[3]), 0.2);
      q[4] = std::max(std::abs(q[4]), 0.2);
      const Eigen::VectorXd rq = residuals(q);
      const double cq = rq.squaredNorm();
      if (std::isfinite(cq) && cq < cost) {
        const double rel = (cost - cq) / std::max(cost, 1e-300);
        p = q;
        r = rq;
        cost = cq;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel < 1e-12) it = 1000;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }
  if (!(p[0] > 0.0) || p[3] > kStampHalf || p[4] > kStampHalf) return std::nullopt;
  if (p[3] < p[4]) {
    std::swap(p[3], p[4]);
    p[5] += std::numbers::pi / 2;
  }
  p[5] = std::fmod(p[5], std::numbers::pi);
  if (p[5] < 0.0) p[5] += std::numbers::pi;
  return StarFit{p, std::sqrt(cost / n)};
}

}  // namespace

std::vector<Point2> find_star_candidates(const Raster& img, std::size_t max_count, double min_sigma) {
  const RobustStats st = robust_stats(img);
  const double threshold = st.median + min_sigma * std::max(st.sigma, 1e-6);
  struct Peak {
    int x, y;
    float v;
  };
  std::vector<Peak> peaks;
  for (int y = kStampHalf; y < img.height() - kStampHalf; ++y) {
    for (int x = kStampHalf; x < img.width() - kStampHalf; ++x) {
      const float v = img(x, y);
      if (v <= threshold) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if ((dx || dy) && img(x + dx, y + dy) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({x, y, v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.v > b.v; });
  // Isolated peaks only: a brighter neighbour within two stamps spoils the fit.
  std::vector<Point2> out;
  std::vector<Peak> kept;
  for (const Peak& p : peaks) {
    bool crowded = false;
    for (const Peak& q : kept) {
      if (std::abs(q.x - p.x) < 2 * kStampHalf && std::abs(q.y - p.y) < 2 * kStampHalf) {
        crowded = true;
        break;
      }
    }
    kept.push_back(p);
    if (!crowded) out.push_back({p.x + 0.5, p.y + 0.5});
    if (out.size() >= max_count) break;
  }
  return out;
}

PsfModel fit_psf(const Raster& img, std::span<const Point2> star_candidates) {
  if (star_candidates.size() < 3) fail(ErrorCategory::kPrecondition, "PSF fit needs at least 3 candidate stars");
  const RobustStats st = robust_stats(img);
  const double threshold = st.median + 5.0 * st.sigma;
  std::vector<double> fx, fy, th;
  for (const Point2& c : star_candidates) {
    const int cx = static_cast<int>(std::floor(c.x));
    const int cy = static_cast<int>(std::floor(c.y));
    if (cx < 1 || cy < 1 || cx >= img.width() - 1 || cy >= img.height() - 1) continue;
    if (img(cx, cy) <= threshold) continue;
    const auto fit = fit_star(img, cx, cy);
    if (!fit || fit->residual_rms >= 0.2 * fit->params[0]) continue;
    fx.push_back(sigma_to_fwhm(fit->params[3]));
    fy.push_back(sigma_to_fwhm(fit->params[4]));
    th.push_back(fit->params[5]);
  }
  if (fx.size() < 3) {
    fail(ErrorCategory::kNumeric, "only " + std::to_string(fx.size()) + " stars produced a usable PSF fit");
  }
  auto med = [](std::vector<double> v) {
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
  };
  return PsfModel{med(fx), med(fy), med(th)};
}

}  // namespace trailkit::sim
