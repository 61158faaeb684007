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

// Line Segment Detector (Grompone von Gioi, Jakubowicz, Morel, Randall),
// following the structure of the reference implementation: Gaussian
// subsampling, 2x2 gradients, pseudo-ordered region growing, rectangle
// approximation, density refinement and a-contrario validation.

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>

#include "trailkit/error.hpp"
#include "trailkit/linedet.hpp"

namespace trailkit::linedet {
namespace {

constexpr double kNotDef = -1024.0;
constexpr double kPi = std::numbers::pi;
constexpr double k2Pi = 2.0 * std::numbers::pi;
constexpr double k3Pi2 = 1.5 * std::numbers::pi;
constexpr double kRelativeErrorFactor = 100.0;

bool double_equal(double a, double b) {
  if (a == b) return true;
  const double abs_diff = std::abs(a - b);
  double abs_max = std::max(std::abs(a), std::abs(b));
  if (abs_max < DBL_MIN) abs_max = DBL_MIN;
  return abs_diff / abs_max <= kRelativeErrorFactor * DBL_EPSILON;
}

int reflect(int i, int n) {
  if (i < 0) return -1 - i;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

double dist(double x1, double y1, double x2, double y2) { return std::hypot(x2 - x1, y2 - y1); }

double angle_diff_signed(double a, double b) {
  a -= b;
  while (a <= -kPi) a += k2Pi;
  while (a > kPi) a -= k2Pi;
  return a;
}

double angle_diff(double a, double b) { return std::abs(angle_diff_signed(a, b)); }

struct Image {
  int xsize = 0;
  int ysize = 0;
  std::vector<double> data;

  Image() = default;
  Image(int x, int y, double fill = 0.0) : xsize(x), ysize(y), data(static_cast<std::size_t>(x) * y, fill) {}
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * xsize + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * xsize + x]; }
};

struct Coord {
  int x;
  int y;
};

void gaussian_kernel(std::vector<double>& kernel, double sigma, double mean) {
  double sum = 0.0;
  for (std::size_t i = 0; i < kernel.size(); ++i) {
    const double val = (static_cast<double>(i) - mean) / sigma;
    kernel[i] = std::exp(-0.5 * val * val);
    sum += kernel[i];
  }
  if (sum >= 0.0) {
    for (double& k : kernel) k /= sum;
  }
}

// Antialiased subsampling by `scale` with a Gaussian of sigma_scale / scale,
// symmetric boundary handling.
Image gaussian_sampler(const Image& in, double scale, double sigma_scale) {
  const int N = static_cast<int>(std::ceil(in.xsize * scale));
  const int M = static_cast<int>(std::ceil(in.ysize * scale));
  Image aux(N, in.ysize);
  Image out(N, M);
  const double sigma = scale < 1.0 ? sigma_scale / scale : sigma_scale;
  const double prec = 2.0;
  const int h = static_cast<int>(std::ceil(sigma * std::sqrt(2.0 * prec * std::log(10.0))));
  const int n = 1 + 2 * h;
  std::vector<double> kernel(static_cast<std::size_t>(n));
  const int dxs = 2 * in.xsize;
  const int dys = 2 * in.ysize;

  for (int x = 0; x < N; ++x) {
    const double xx = x / scale;
    const int xc = static_cast<int>(std::floor(xx + 0.5));
    gaussian_kernel(kernel, sigma, h + xx - xc);
    for (int y = 0; y < in.ysize; ++y) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        int j = xc - h + i;
        while (j < 0) j += dxs;
        while (j >= dxs) j -= dxs;
        if (j >= in.xsize) j = dxs - 1 - j;
        sum += in.at(j, y) * kernel[static_cast<std::size_t>(i)];
      }
      aux.at(x, y) = sum;
    }
  }
  for (int y = 0; y < M; ++y) {
    const double yy = y / scale;
    const int yc = static_cast<int>(std::floor(yy + 0.5));
    gaussian_kernel(kernel, sigma, h + yy - yc);
    for (int x = 0; x < N; ++x) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) {
        int j = yc - h + i;
        while (j < 0) j += dys;
        while (j >= dys) j -= dys;
        if (j >= in.ysize) j = dys - 1 - j;
        sum += aux.at(x, j) * kernel[static_cast<std::size_t>(i)];
      }
      out.at(x, y) = sum;
    }
  }
  return out;
}

struct Gradient {
  Image angles;
  Image modgrad;
  std::vector<Coord> order;  ///< pixels by decreasing gradient (pseudo-ordered)
};

Gradient ll_angle(const Image& in, double threshold, int n_bins) {
  const int p = in.xsize;
  const int n = in.ysize;
  Gradient g;
  g.angles = Image(p, n, kNotDef);
  g.modgrad = Image(p, n, 0.0);
  double max_grad = 0.0;
  for (int x = 0; x < p - 1; ++x) {
    for (int y = 0; y < n - 1; ++y) {
      const double com1 = in.at(x + 1, y + 1) - in.at(x, y);
      const double com2 = in.at(x + 1, y) - in.at(x, y + 1);
      const double gx = com1 + com2;
      const double gy = com1 - com2;
      const double norm = std::sqrt((gx * gx + gy * gy) / 4.0);
      g.modgrad.at(x, y) = norm;
      if (norm <= threshold) {
        g.angles.at(x, y) = kNotDef;
      } else {
        g.angles.at(x, y) = std::atan2(gx, -gy);
        max_grad = std::max(max_grad, norm);
      }
    }
  }
  // Bucket sort into n_bins gradient classes, then concatenate from strongest.
  std::vector<std::vector<Coord>> bins(static_cast<std::size_t>(n_bins));
  if (max_grad > 0.0) {
    for (int x = 0; x < p - 1; ++x) {
      for (int y = 0; y < n - 1; ++y) {
        auto i = static_cast<long>(g.modgrad.at(x, y) * n_bins / max_grad);
        if (i >= n_bins) i = n_bins - 1;
        bins[static_cast<std::size_t>(i)].push_back({x, y});
      }
    }
  }
  for (int i = n_bins - 1; i >= 0; --i) {
    const auto& b = bins[static_cast<std::size_t>(i)];
    g.order.insert(g.order.end(), b.begin(), b.end());
  }
  return g;
}

bool isaligned(int x, int y, const Image& angles, double theta, double prec) {
  const double a = angles.at(x, y);
  if (a == kNotDef) return false;
  theta -= a;
  if (theta < 0.0) theta = -theta;
  if (theta > k3Pi2) {
    theta -= k2Pi;
    if (theta < 0.0) theta = -theta;
  }
  return theta <= prec;
}

double nfa(int n, int k, double p, double logNT) {
  constexpr double tolerance = 0.1;
  if (n == 0 || k == 0) return -logNT;
  if (n == k) return -logNT - static_cast<double>(n) * std::log10(p);
  const double p_term = p / (1.0 - p);
  const double log1term = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                          k * std::log(p) + (n - k) * std::log(1.0 - p);
  double term = std::exp(log1term);
  if (double_equal(term, 0.0)) {
    if (k > n * p) return -log1term / std::numbers::ln10 - logNT;
    return -logNT;
  }
  double bin_tail = term;
  for (int i = k + 1; i <= n; ++i) {
    const double bin_term = static_cast<double>(n - i + 1) / i;
    const double mult_term = bin_term * p_term;
    term *= mult_term;
    bin_tail += term;
    if (bin_term < 1.0) {
      const double err = term * ((1.0 - std::pow(mult_term, n - i + 1)) / (1.0 - mult_term) - 1.0);
      if (err < tolerance * std::abs(-std::log10(bin_tail) - logNT) * bin_tail) break;
    }
  }
  return -std::log10(bin_tail) - logNT;
}

struct Rect {
  double x1, y1, x2, y2;
  double width;
  double x, y;
  double theta;
  double dx, dy;
  double prec;
  double p;
};

double inter_low(double x, double x1, double y1, double x2, double y2) {
  if (double_equal(x1, x2) && y1 < y2) return y1;
  if (double_equal(x1, x2) && y1 > y2) return y2;
  return y1 + (x - x1) * (y2 - y1) / (x2 - x1);
}

double inter_hi(double x, double x1, double y1, double x2, double y2) {
  if (double_equal(x1, x2) && y1 < y2) return y2;
  if (double_equal(x1, x2) && y1 > y2) return y1;
  return y1 + (x - x1) * (y2 - y1) / (x2 - x1);
}

// Visits the integer points inside a rectangle column by column.
class RectIter {
 public:
  explicit RectIter(const Rect& r) {
    double vxs[4], vys[4];
    vxs[0] = r.x1 - r.dy * r.width / 2.0;
    vys[0] = r.y1 + r.dx * r.width / 2.0;
    vxs[1] = r.x2 - r.dy * r.width / 2.0;
    vys[1] = r.y2 + r.dx * r.width / 2.0;
    vxs[2] = r.x2 + r.dy * r.width / 2.0;
    vys[2] = r.y2 - r.dx * r.width / 2.0;
    vxs[3] = r.x1 + r.dy * r.width / 2.0;
    vys[3] = r.y1 - r.dx * r.width / 2.0;
    int offset;
    if (r.x1 < r.x2 && r.y1 <= r.y2) offset = 0;
    else if (r.x1 >= r.x2 && r.y1 < r.y2) offset = 1;
    else if (r.x1 > r.x2 && r.y1 >= r.y2) offset = 2;
    else offset = 3;
    for (int k = 0; k < 4; ++k) {
      vx[k] = vxs[(offset + k) % 4];
      vy[k] = vys[(offset + k) % 4];
    }
    x = static_cast<int>(std::ceil(vx[0])) - 1;
    y = static_cast<int>(std::ceil(vy[0]));
    ys = ye = -DBL_MAX;
    inc();
  }

  bool end() const { return static_cast<double>(x) > vx[2]; }

  void inc() {
    if (!end()) ++y;
    while (static_cast<double>(y) > ye && !end()) {
      ++x;
      if (end()) break;
      if (x < vx[3]) ys = inter_low(x, vx[0], vy[0], vx[3], vy[3]);
      else ys = inter_low(x, vx[3], vy[3], vx[2], vy[2]);
      if (x < vx[1]) ye = inter_hi(x, vx[0], vy[0], vx[1], vy[1]);
      else ye = inter_hi(x, vx[1], vy[1], vx[2], vy[2]);
      y = static_cast<int>(std::ceil(ys));
    }
  }

  int x, y;

 private:
  double vx[4], vy[4];
  double ys, ye;
};

double rect_nfa(const Rect& rec, const Image& angles, double logNT) {
  int pts = 0;
  int alg = 0;
  for (RectIter it(rec); !it.end(); it.inc()) {
    if (it.x >= 0 && it.y >= 0 && it.x < angles.xsize && it.y < angles.ysize) {
      ++pts;
      if (isaligned(it.x, it.y, angles, rec.theta, rec.prec)) ++alg;
    }
  }
  return nfa(pts, alg, rec.p, logNT);
}

class Detector {
 public:
  Detector(const Gradient& g, double prec, double p, double density_th)
      : angles_(g.angles), modgrad_(g.modgrad), prec_(prec), p_(p), density_th_(density_th),
        used_(static_cast<std::size_t>(g.angles.xsize) * g.angles.ysize, 0) {
    reg_.reserve(1024);
  }

  std::vector<LineSegment> run(const std::vector<Coord>& order, double logNT, double log_eps, double scale) {
    const int min_reg_size = static_cast<int>(-logNT / std::log10(p_));
    std::vector<LineSegment> out;
    for (const Coord& c : order) {
      if (used(c.x, c.y) || angles_.at(c.x, c.y) == kNotDef) continue;
      double reg_angle = 0.0;
      region_grow(c.x, c.y, reg_angle, prec_);
      if (static_cast<int>(reg_.size()) < min_reg_size) continue;
      Rect rec{};
      region2rect(reg_angle, rec);
      if (!refine(reg_angle, rec)) continue;
      const double log_nfa = rect_improve(rec, logNT, log_eps);
      if (log_nfa <= log_eps) continue;
      // Gradient samples sit at the centre of their 2x2 window; then undo
      // the subsampling and move to continuous (pixel-edge) coordinates.
      Point2 a{(rec.x1 + 0.5) / scale + 0.5, (rec.y1 + 0.5) / scale + 0.5};
      Point2 b{(rec.x2 + 0.5) / scale + 0.5, (rec.y2 + 0.5) / scale + 0.5};
      if (a == b) continue;
      out.push_back(make_segment(a, b, rec.width / scale, log_nfa));
    }
    return out;
  }

 private:
  bool used(int x, int y) const { return used_[static_cast<std::size_t>(y) * angles_.xsize + x] != 0; }
  void set_used(int x, int y, bool v) { used_[static_cast<std::size_t>(y) * angles_.xsize + x] = v ? 1 : 0; }

  void region_grow(int x, int y, double& reg_angle, double prec) {
    reg_.clear();
    reg_.push_back({x, y});
    reg_angle = angles_.at(x, y);
    double sumdx = std::cos(reg_angle);
    double sumdy = std::sin(reg_angle);
    set_used(x, y, true);
    for (std::size_t i = 0; i < reg_.size(); ++i) {
      const Coord c = reg_[i];
      for (int xx = c.x - 1; xx <= c.x + 1; ++xx) {
        for (int yy = c.y - 1; yy <= c.y + 1; ++yy) {
          if (xx >= 0 && yy >= 0 && xx < angles_.xsize && yy < angles_.ysize && !used(xx, yy) &&
              isaligned(xx, yy, angles_, reg_angle, prec)) {
            set_used(xx, yy, true);
            reg_.push_back({xx, yy});
            sumdx += std::cos(angles_.at(xx, yy));
            sumdy += std::sin(angles_.at(xx, yy));
            reg_angle = std::atan2(sumdy, sumdx);
          }
        }
      }
    }
  }

  double get_theta(double x, double y, double reg_angle) const {
    double Ixx = 0.0, Iyy = 0.0, Ixy = 0.0;
    for (const Coord& c : reg_) {
      const double w = modgrad_.at(c.x, c.y);
      Ixx += (c.y - y) * (c.y - y) * w;
      Iyy += (c.x - x) * (c.x - x) * w;
      Ixy -= (c.x - x) * (c.y - y) * w;
    }
    const double lambda = 0.5 * (Ixx + Iyy - std::sqrt((Ixx - Iyy) * (Ixx - Iyy) + 4.0 * Ixy * Ixy));
    double theta = std::abs(Ixx) > std::abs(Iyy) ? std::atan2(lambda - Ixx, Ixy) : std::atan2(Ixy, lambda - Iyy);
    if (angle_diff(theta, reg_angle) > prec_) theta += kPi;
    return theta;
  }

  void region2rect(double reg_angle, Rect& rec) const {
    double x = 0.0, y = 0.0, sum = 0.0;
    for (const Coord& c : reg_) {
      const double w = modgrad_.at(c.x, c.y);
      x += c.x * w;
      y += c.y * w;
      sum += w;
    }
    x /= sum;
    y /= sum;
    const double theta = get_theta(x, y, reg_angle);
    const double dx = std::cos(theta);
    const double dy = std::sin(theta);
    double l_min = 0.0, l_max = 0.0, w_min = 0.0, w_max = 0.0;
    for (const Coord& c : reg_) {
      const double l = (c.x - x) * dx + (c.y - y) * dy;
      const double w = -(c.x - x) * dy + (c.y - y) * dx;
      l_max = std::max(l_max, l);
      l_min = std::min(l_min, l);
      w_max = std::max(w_max, w);
      w_min = std::min(w_min, w);
    }
    rec.x1 = x + l_min * dx;
    rec.y1 = y + l_min * dy;
    rec.x2 = x + l_max * dx;
    rec.y2 = y + l_max * dy;
    rec.width = std::max(w_max - w_min, 1.0);
    rec.x = x;
    rec.y = y;
    rec.theta = theta;
    rec.dx = dx;
    rec.dy = dy;
    rec.prec = prec_;
    rec.p = p_;
  }

  double density(const Rect& rec) const {
    return static_cast<double>(reg_.size()) / (dist(rec.x1, rec.y1, rec.x2, rec.y2) * rec.width);
  }

  bool reduce_region_radius(double reg_angle, Rect& rec) {
    double d = density(rec);
    if (d >= density_th_) return true;
    const double xc = reg_[0].x;
    const double yc = reg_[0].y;
    double rad = std::max(dist(xc, yc, rec.x1, rec.y1), dist(xc, yc, rec.x2, rec.y2));
    while (d < density_th_) {
      rad *= 0.75;
      for (std::size_t i = 0; i < reg_.size(); ++i) {
        if (dist(xc, yc, reg_[i].x, reg_[i].y) > rad) {
          set_used(reg_[i].x, reg_[i].y, false);
          reg_[i] = reg_.back();
          reg_.pop_back();
          --i;
        }
      }
      if (reg_.size() < 2) return false;
      region2rect(reg_angle, rec);
      d = density(rec);
    }
    return true;
  }

  bool refine(double& reg_angle, Rect& rec) {
    if (density(rec) >= density_th_) return true;
    const int xc = reg_[0].x;
    const int yc = reg_[0].y;
    const double ang_c = angles_.at(xc, yc);
    double sum = 0.0, s_sum = 0.0;
    int n = 0;
    for (const Coord& c : reg_) {
      set_used(c.x, c.y, false);
      if (dist(xc, yc, c.x, c.y) < rec.width) {
        const double ang_d = angle_diff_signed(angles_.at(c.x, c.y), ang_c);
        sum += ang_d;
        s_sum += ang_d * ang_d;
        ++n;
      }
    }
    const double mean_angle = sum / n;
    const double tau = 2.0 * std::sqrt((s_sum - 2.0 * mean_angle * sum) / n + mean_angle * mean_angle);
    region_grow(xc, yc, reg_angle, tau);
    if (reg_.size() < 2) return false;
    region2rect(reg_angle, rec);
    if (density(rec) < density_th_) return reduce_region_radius(reg_angle, rec);
    return true;
  }

  double rect_improve(Rect& rec, double logNT, double log_eps) const {
    constexpr double delta = 0.5;
    constexpr double delta_2 = delta / 2.0;
    double log_nfa = rect_nfa(rec, angles_, logNT);
    if (log_nfa > log_eps) return log_nfa;

    Rect r = rec;
    for (int n = 0; n < 5; ++n) {
      r.p /= 2.0;
      r.prec = r.p * kPi;
      const double v = rect_nfa(r, angles_, logNT);
      if (v > log_nfa) {
        log_nfa = v;
        rec = r;
      }
    }
    if (log_nfa > log_eps) return log_nfa;

    r = rec;
    for (int n = 0; n < 5; ++n) {
      if (r.width - delta >= 0.5) {
        r.width -= delta;
        const double v = rect_nfa(r, angles_, logNT);
        if (v > log_nfa) {
          rec = r;
          log_nfa = v;
        }
      }
    }
    if (log_nfa > log_eps) return log_nfa;

    r = rec;
    for (int n = 0; n < 5; ++n) {
      if (r.width - delta >= 0.5) {
        r.x1 += -r.dy * delta_2;
        r.y1 += r.dx * delta_2;
        r.x2 += -r.dy * delta_2;
        r.y2 += r.dx * delta_2;
        r.width -= delta;
        const double v = rect_nfa(r, angles_, logNT);
        if (v > log_nfa) {
          rec = r;
          log_nfa = v;
        }
      }
    }
    if (log_nfa > log_eps) return log_nfa;

    r = rec;
    for (int n = 0; n < 5; ++n) {
      if (r.width - delta >= 0.5) {
        r.x1 -= -r.dy * delta_2;
        r.y1 -= r.dx * delta_2;
        r.x2 -= -r.dy * delta_2;
        r.y2 -= r.dx * delta_2;
        r.width -= delta;
        const double v = rect_nfa(r, angles_, logNT);
        if (v > log_nfa) {
          rec = r;
          log_nfa = v;
        }
      }
    }
    if (log_nfa > log_eps) return log_nfa;

    r = rec;
    for (int n = 0; n < 5; ++n) {
      r.p /= 2.0;
      r.prec = r.p * kPi;
      const double v = rect_nfa(r, angles_, logNT);
      if (v > log_nfa) {
        log_nfa = v;
        rec = r;
      }
    }
    return log_nfa;
  }

  const Image& angles_;
  const Image& modgrad_;
  double prec_;
  double p_;
  double density_th_;
  std::vector<unsigned char> used_;
  std::vector<Coord> reg_;
};

}  // namespace

double LsdParams::effective_grad_threshold() const {
  return grad_threshold > 0.0 ? grad_threshold : quant / std::sin(angle_tolerance);
}

void LsdParams::validate() const {
  if (!(angle_tolerance > 0.0 && angle_tolerance < kPi / 2)) {
    fail(ErrorCategory::kConfig, "LSD angle tolerance must lie in (0, pi/2)");
  }
  if (!(min_length_ratio >= 0.0 && min_length_ratio <= 1.0)) {
    fail(ErrorCategory::kConfig, "min_length_ratio must lie in [0, 1]");
  }
  if (!(nfa_epsilon > 0.0)) fail(ErrorCategory::kConfig, "nfa_epsilon must be > 0");
  if (!(scale > 0.0)) fail(ErrorCategory::kConfig, "LSD scale must be > 0");
  if (!(sigma_scale > 0.0)) fail(ErrorCategory::kConfig, "LSD sigma_scale must be > 0");
  if (!(density_threshold >= 0.0 && density_threshold <= 1.0)) {
    fail(ErrorCategory::kConfig, "LSD density threshold must lie in [0, 1]");
  }
  if (!(quant >= 0.0)) fail(ErrorCategory::kConfig, "LSD quantisation error must be >= 0");
  if (n_bins < 1) fail(ErrorCategory::kConfig, "LSD n_bins must be >= 1");
  if (border_padding < 0) fail(ErrorCategory::kConfig, "LSD border_padding must be >= 0");
}

std::vector<LineSegment> lsd_detect(const Raster& img, const LsdParams& params) {
  params.validate();
  if (img.width() < 8 || img.height() < 8) {
    fail(ErrorCategory::kPrecondition, "LSD needs an image of at least 8 px on each side");
  }
  const int pad = std::min({params.border_padding, img.width(), img.height()});
  Image in(img.width() + 2 * pad, img.height() + 2 * pad);
  for (int y = 0; y < in.ysize; ++y) {
    const int sy = reflect(y - pad, img.height());
    for (int x = 0; x < in.xsize; ++x) in.at(x, y) = img(reflect(x - pad, img.width()), sy);
  }
  const Image sampled = params.scale != 1.0 ? gaussian_sampler(in, params.scale, params.sigma_scale) : in;
  const Gradient g = ll_angle(sampled, params.effective_grad_threshold(), params.n_bins);
  const double logNT =
      5.0 * (std::log10(static_cast<double>(sampled.xsize)) + std::log10(static_cast<double>(sampled.ysize))) / 2.0 +
      std::log10(11.0);
  const double log_eps = -std::log10(params.nfa_epsilon);
  Detector det(g, params.angle_tolerance, params.precision(), params.density_threshold);
  std::vector<LineSegment> segs;
  const trailkit::Rect frame{0.0, 0.0, static_cast<double>(img.width()), static_cast<double>(img.height())};
  for (LineSegment s : det.run(g.order, logNT, log_eps, params.scale)) {
    const Point2 shift{static_cast<double>(pad), static_cast<double>(pad)};
    const auto clipped = clip_segment(s.p0 - shift, s.p1 - shift, frame);
    if (!clipped) continue;
    segs.push_back(make_segment(clipped->first, clipped->second, s.width, s.nfa_log10));
  }
  std::stable_sort(segs.begin(), segs.end(),
                   [](const LineSegment& a, const LineSegment& b) { return a.length() > b.length(); });
  return segs;
}

std::vector<LineSegment> lsd_detect(const BinaryMask& mask, const LsdParams& params) {
  return lsd_detect(mask_to_raster(mask, 255.0f), params);
}

Raster probability_to_grey(const Raster& prob) {
  Raster out(prob.width(), prob.height());
  auto src = prob.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = 255.0f * std::clamp(src[i], 0.0f, 1.0f);
  return out;
}

}  // namespace trailkit::linedet
