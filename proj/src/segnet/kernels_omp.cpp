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

#include <Eigen/Core>
#include <algorithm>

#include "trailkit/error.hpp"
#include "trailkit/segnet/kernels.hpp"

namespace trailkit::segnet::kernels {
namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<Mat<T>>;
template <typename T>
using CMapM = Eigen::Map<const Mat<T>>;

// col[(ci*k + ky)*k + kx][y*w + x] = x[ci][y + ky - pad][x + kx - pad], zero outside.
template <typename T>
void im2col(const T* src, int cin, int h, int w, int k, int pad, T* col) {
  const int rows = cin * k * k;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
  for (int r = 0; r < rows; ++r) {
    const int ci = r / (k * k);
    const int ky = (r / k) % k;
    const int kx = r % k;
    const T* s = src + static_cast<std::size_t>(ci) * plane;
    T* d = col + static_cast<std::size_t>(r) * plane;
    const int dx = kx - pad;
    const int x_lo = std::max(0, -dx);
    const int x_hi = std::min(w, w - dx);
    for (int y = 0; y < h; ++y) {
      const int sy = y + ky - pad;
      T* drow = d + static_cast<std::size_t>(y) * w;
      if (sy < 0 || sy >= h || x_lo >= x_hi) {
        std::fill(drow, drow + w, T(0));
        continue;
      }
      const T* srow = s + static_cast<std::size_t>(sy) * w;
      std::fill(drow, drow + x_lo, T(0));
      std::copy(srow + x_lo + dx, srow + x_hi + dx, drow + x_lo);
      std::fill(drow + x_hi, drow + w, T(0));
    }
  }
}

// Adjoint of im2col: dst is overwritten. Parallel over input channels so
// every thread owns a disjoint slice of dst.
template <typename T>
void col2im(const T* col, int cin, int h, int w, int k, int pad, T* dst) {
  const std::size_t plane = static_cast<std::size_t>(h) * w;
#pragma omp parallel for schedule(static)
  for (int ci = 0; ci < cin; ++ci) {
    T* d = dst + static_cast<std::size_t>(ci) * plane;
    std::fill(d, d + plane, T(0));
    for (int ky = 0; ky < k; ++ky) {
      for (int kx = 0; kx < k; ++kx) {
        const T* c = col + static_cast<std::size_t>((ci * k + ky) * k + kx) * plane;
        const int dx = kx - pad;
        const int x_lo = std::max(0, -dx);
        const int x_hi = std::min(w, w - dx);
        for (int y = 0; y < h; ++y) {
          const int sy = y + ky - pad;
          if (sy < 0 || sy >= h) continue;
          const T* crow = c + static_cast<std::size_t>(y) * w;
          T* drow = d + static_cast<std::size_t>(sy) * w + dx;
          for (int x = x_lo; x < x_hi; ++x) drow[x] += crow[x];
        }
      }
    }
  }
}

}  // namespace

template <typename T>
void conv2d_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout, int k,
                    int pad, Tensor<T>& y) {
  const int kk = x.c * k * k;
  require(weight.size() == static_cast<std::size_t>(cout) * kk, "conv2d weight size mismatch");
  require(bias.empty() || bias.size() == static_cast<std::size_t>(cout), "conv2d bias size mismatch");
  require(2 * pad == k - 1, "conv2d supports 'same' padding only");
  if (y.n != x.n || y.c != cout || y.h != x.h || y.w != x.w) y = Tensor<T>(x.n, cout, x.h, x.w);
  const int p = static_cast<int>(x.plane());
  const bool direct = (k == 1);
  std::vector<T> col(direct ? 0 : static_cast<std::size_t>(kk) * p);
  CMapM<T> W(weight.data(), cout, kk);
  for (int i = 0; i < x.n; ++i) {
    const T* src = x.sample(i);
    if (!direct) {
      im2col(src, x.c, x.h, x.w, k, pad, col.data());
      src = col.data();
    }
    MapM<T> Y(y.sample(i), cout, p);
    Y.noalias() = W * CMapM<T>(src, kk, p);
    if (!bias.empty()) {
#pragma omp parallel for schedule(static)
      for (int co = 0; co < cout; ++co) Y.row(co).array() += bias[static_cast<std::size_t>(co)];
    }
  }
}

template <typename T>
void conv2d_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, int k, int pad,
                     Tensor<T>* dx, std::span<T> dweight, std::span<T> dbias) {
  const int cout = dy.c;
  const int kk = x.c * k * k;
  require(dy.n == x.n && dy.h == x.h && dy.w == x.w, "conv2d gradient shape mismatch");
  require(weight.size() == static_cast<std::size_t>(cout) * kk && dweight.size() == weight.size(),
          "conv2d weight gradient size mismatch");
  if (dx && !dx->same_shape(x)) *dx = Tensor<T>(x.n, x.c, x.h, x.w);
  const int p = static_cast<int>(x.plane());
  const bool direct = (k == 1);
  std::vector<T> col(direct ? 0 : static_cast<std::size_t>(kk) * p);
  std::vector<T> dcol(dx && !direct ? static_cast<std::size_t>(kk) * p : 0);
  CMapM<T> W(weight.data(), cout, kk);
  MapM<T> dW(dweight.data(), cout, kk);
  for (int i = 0; i < x.n; ++i) {
    const T* src = x.sample(i);
    if (!direct) {
      im2col(src, x.c, x.h, x.w, k, pad, col.data());
      src = col.data();
    }
    CMapM<T> dY(dy.sample(i), cout, p);
    dW.noalias() += dY * CMapM<T>(src, kk, p).transpose();
    if (!dbias.empty()) {
      for (int co = 0; co < cout; ++co) dbias[static_cast<std::size_t>(co)] += dY.row(co).sum();
    }
    if (dx) {
      if (direct) {
        MapM<T>(dx->sample(i), kk, p).noalias() = W.transpose() * dY;
      } else {
        MapM<T>(dcol.data(), kk, p).noalias() = W.transpose() * dY;
        col2im(dcol.data(), x.c, x.h, x.w, k, pad, dx->sample(i));
      }
    }
  }
}

template <typename T>
void upconv2x2_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout,
                       Tensor<T>& y) {
  require(weight.size() == static_cast<std::size_t>(cout) * 4 * x.c, "upconv weight size mismatch");
  require(bias.empty() || bias.size() == static_cast<std::size_t>(cout), "upconv bias size mismatch");
  if (y.n != x.n || y.c != cout || y.h != 2 * x.h || y.w != 2 * x.w) y = Tensor<T>(x.n, cout, 2 * x.h, 2 * x.w);
  const int p = static_cast<int>(x.plane());
  Mat<T> z(4 * cout, p);
  CMapM<T> W(weight.data(), 4 * cout, x.c);
  for (int i = 0; i < x.n; ++i) {
    z.noalias() = W * CMapM<T>(x.sample(i), x.c, p);
#pragma omp parallel for schedule(static)
    for (int co = 0; co < cout; ++co) {
      const T b = bias.empty() ? T(0) : bias[static_cast<std::size_t>(co)];
      T* out = y.channel(i, co);
      for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) {
          const T* zr = z.data() + static_cast<std::size_t>(co * 4 + a * 2 + bb) * p;
          for (int yy = 0; yy < x.h; ++yy) {
            T* orow = out + static_cast<std::size_t>(2 * yy + a) * y.w + bb;
            const T* zrow = zr + static_cast<std::size_t>(yy) * x.w;
            for (int xx = 0; xx < x.w; ++xx) orow[2 * xx] = zrow[xx] + b;
          }
        }
      }
    }
  }
}

template <typename T>
void upconv2x2_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, Tensor<T>& dx,
                        std::span<T> dweight, std::span<T> dbias) {
  const int cout = dy.c;
  require(dy.n == x.n && dy.h == 2 * x.h && dy.w == 2 * x.w, "upconv gradient shape mismatch");
  require(weight.size() == static_cast<std::size_t>(cout) * 4 * x.c && dweight.size() == weight.size(),
          "upconv weight gradient size mismatch");
  if (!dx.same_shape(x)) dx = Tensor<T>(x.n, x.c, x.h, x.w);
  const int p = static_cast<int>(x.plane());
  Mat<T> dz(4 * cout, p);
  CMapM<T> W(weight.data(), 4 * cout, x.c);
  MapM<T> dW(dweight.data(), 4 * cout, x.c);
  for (int i = 0; i < x.n; ++i) {
#pragma omp parallel for schedule(static)
    for (int co = 0; co < cout; ++co) {
      const T* g = dy.channel(i, co);
      for (int a = 0; a < 2; ++a) {
        for (int bb = 0; bb < 2; ++bb) {
          T* zr = dz.data() + static_cast<std::size_t>(co * 4 + a * 2 + bb) * p;
          for (int yy = 0; yy < x.h; ++yy) {
            const T* grow = g + static_cast<std::size_t>(2 * yy + a) * dy.w + bb;
            T* zrow = zr + static_cast<std::size_t>(yy) * x.w;
            for (int xx = 0; xx < x.w; ++xx) zrow[xx] = grow[2 * xx];
          }
        }
      }
    }
    CMapM<T> X(x.sample(i), x.c, p);
    dW.noalias() += dz * X.transpose();
    if (!dbias.empty()) {
      for (int co = 0; co < cout; ++co) {
        dbias[static_cast<std::size_t>(co)] += dz.middleRows(4 * co, 4).sum();
      }
    }
    MapM<T>(dx.sample(i), x.c, p).noalias() = W.transpose() * dz;
  }
}

template <typename T>
void maxpool2_forward(const Tensor<T>& x, Tensor<T>& y, std::vector<int>& argmax) {
  require(x.h % 2 == 0 && x.w % 2 == 0, "maxpool input must have even dimensions");
  if (y.n != x.n || y.c != x.c || y.h != x.h / 2 || y.w != x.w / 2) y = Tensor<T>(x.n, x.c, x.h / 2, x.w / 2);
  argmax.resize(y.size());
  const int planes = x.n * x.c;
#pragma omp parallel for schedule(static)
  for (int pl = 0; pl < planes; ++pl) {
    const T* s = x.data.data() + static_cast<std::size_t>(pl) * x.plane();
    T* d = y.data.data() + static_cast<std::size_t>(pl) * y.plane();
    int* am = argmax.data() + static_cast<std::size_t>(pl) * y.plane();
    for (int yy = 0; yy < y.h; ++yy) {
      for (int xx = 0; xx < y.w; ++xx) {
        int best = (2 * yy) * x.w + 2 * xx;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const int idx = (2 * yy + a) * x.w + 2 * xx + b;
            if (s[idx] > s[best]) best = idx;
          }
        }
        d[yy * y.w + xx] = s[best];
        am[yy * y.w + xx] = best;
      }
    }
  }
}

template <typename T>
void maxpool2_backward(const Tensor<T>& dy, const std::vector<int>& argmax, Tensor<T>& dx) {
  require(argmax.size() == dy.size(), "maxpool argmax size mismatch");
  require(dx.n == dy.n && dx.c == dy.c && dx.h == 2 * dy.h && dx.w == 2 * dy.w, "maxpool gradient shape mismatch");
  const int planes = dy.n * dy.c;
#pragma omp parallel for schedule(static)
  for (int pl = 0; pl < planes; ++pl) {
    T* d = dx.data.data() + static_cast<std::size_t>(pl) * dx.plane();
    const T* g = dy.data.data() + static_cast<std::size_t>(pl) * dy.plane();
    const int* am = argmax.data() + static_cast<std::size_t>(pl) * dy.plane();
    std::fill(d, d + dx.plane(), T(0));
    for (std::size_t k = 0; k < dy.plane(); ++k) d[am[k]] += g[k];
  }
}

#define TRAILKIT_INSTANTIATE(T)                                                                                 \
  template void conv2d_forward<T>(const Tensor<T>&, std::span<const T>, std::span<const T>, int, int, int,       \
                                  Tensor<T>&);                                                                 \
  template void conv2d_backward<T>(const Tensor<T>&, std::span<const T>, const Tensor<T>&, int, int, Tensor<T>*, \
                                   std::span<T>, std::span<T>);                                                \
  template void upconv2x2_forward<T>(const Tensor<T>&, std::span<const T>, std::span<const T>, int, Tensor<T>&); \
  template void upconv2x2_backward<T>(const Tensor<T>&, std::span<const T>, const Tensor<T>&, Tensor<T>&,        \
                                      std::span<T>, std::span<T>);                                             \
  template void maxpool2_forward<T>(const Tensor<T>&, Tensor<T>&, std::vector<int>&);                           \
  template void maxpool2_backward<T>(const Tensor<T>&, const std::vector<int>&, Tensor<T>&);

TRAILKIT_INSTANTIATE(float)
TRAILKIT_INSTANTIATE(double)
#undef TRAILKIT_INSTANTIATE

}  // namespace trailkit::segnet::kernels
