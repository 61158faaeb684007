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

// Serial reference kernels: textbook loops, no blocking, no threads.

#include "trailkit/error.hpp"
#include "trailkit/segnet/kernels.hpp"

namespace trailkit::segnet::reference {

template <typename T>
void conv2d_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout, int k,
                    int pad, Tensor<T>& y) {
  require(weight.size() == static_cast<std::size_t>(cout) * x.c * k * k, "conv2d weight size mismatch");
  y = Tensor<T>(x.n, cout, x.h, x.w);
  for (int i = 0; i < x.n; ++i) {
    for (int co = 0; co < cout; ++co) {
      for (int yy = 0; yy < x.h; ++yy) {
        for (int xx = 0; xx < x.w; ++xx) {
          T acc = bias.empty() ? T(0) : bias[static_cast<std::size_t>(co)];
          for (int ci = 0; ci < x.c; ++ci) {
            for (int ky = 0; ky < k; ++ky) {
              const int sy = yy + ky - pad;
              if (sy < 0 || sy >= x.h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int sx = xx + kx - pad;
                if (sx < 0 || sx >= x.w) continue;
                acc += weight[static_cast<std::size_t>(((co * x.c + ci) * k + ky) * k + kx)] * x.at(i, ci, sy, sx);
              }
            }
          }
          y.at(i, co, yy, xx) = acc;
        }
      }
    }
  }
}

template <typename T>
void conv2d_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, int k, int pad,
                     Tensor<T>* dx, std::span<T> dweight, std::span<T> dbias) {
  const int cout = dy.c;
  require(weight.size() == static_cast<std::size_t>(cout) * x.c * k * k && dweight.size() == weight.size(),
          "conv2d weight gradient size mismatch");
  if (dx) *dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int i = 0; i < x.n; ++i) {
    for (int co = 0; co < cout; ++co) {
      for (int yy = 0; yy < x.h; ++yy) {
        for (int xx = 0; xx < x.w; ++xx) {
          const T g = dy.at(i, co, yy, xx);
          if (!dbias.empty()) dbias[static_cast<std::size_t>(co)] += g;
          for (int ci = 0; ci < x.c; ++ci) {
            for (int ky = 0; ky < k; ++ky) {
              const int sy = yy + ky - pad;
              if (sy < 0 || sy >= x.h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int sx = xx + kx - pad;
                if (sx < 0 || sx >= x.w) continue;
                const auto widx = static_cast<std::size_t>(((co * x.c + ci) * k + ky) * k + kx);
                dweight[widx] += g * x.at(i, ci, sy, sx);
                if (dx) dx->at(i, ci, sy, sx) += g * weight[widx];
              }
            }
          }
        }
      }
    }
  }
}

template <typename T>
void upconv2x2_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout,
                       Tensor<T>& y) {
  require(weight.size() == static_cast<std::size_t>(cout) * 4 * x.c, "upconv weight size mismatch");
  y = Tensor<T>(x.n, cout, 2 * x.h, 2 * x.w);
  for (int i = 0; i < x.n; ++i) {
    for (int co = 0; co < cout; ++co) {
      for (int yy = 0; yy < y.h; ++yy) {
        for (int xx = 0; xx < y.w; ++xx) {
          const int a = yy % 2;
          const int b = xx % 2;
          T acc = bias.empty() ? T(0) : bias[static_cast<std::size_t>(co)];
          for (int ci = 0; ci < x.c; ++ci) {
            acc += weight[static_cast<std::size_t>((co * 4 + a * 2 + b) * x.c + ci)] * x.at(i, ci, yy / 2, xx / 2);
          }
          y.at(i, co, yy, xx) = acc;
        }
      }
    }
  }
}

template <typename T>
void upconv2x2_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, Tensor<T>& dx,
                        std::span<T> dweight, std::span<T> dbias) {
  const int cout = dy.c;
  require(weight.size() == static_cast<std::size_t>(cout) * 4 * x.c && dweight.size() == weight.size(),
          "upconv weight gradient size mismatch");
  dx = Tensor<T>(x.n, x.c, x.h, x.w);
  for (int i = 0; i < x.n; ++i) {
    for (int co = 0; co < cout; ++co) {
      for (int yy = 0; yy < dy.h; ++yy) {
        for (int xx = 0; xx < dy.w; ++xx) {
          const T g = dy.at(i, co, yy, xx);
          if (!dbias.empty()) dbias[static_cast<std::size_t>(co)] += g;
          const int a = yy % 2;
          const int b = xx % 2;
          for (int ci = 0; ci < x.c; ++ci) {
            const auto widx = static_cast<std::size_t>((co * 4 + a * 2 + b) * x.c + ci);
            dweight[widx] += g * x.at(i, ci, yy / 2, xx / 2);
            dx.at(i, ci, yy / 2, xx / 2) += g * weight[widx];
          }
        }
      }
    }
  }
}

template <typename T>
void maxpool2_forward(const Tensor<T>& x, Tensor<T>& y, std::vector<int>& argmax) {
  require(x.h % 2 == 0 && x.w % 2 == 0, "maxpool input must have even dimensions");
  y = Tensor<T>(x.n, x.c, x.h / 2, x.w / 2);
  argmax.assign(y.size(), 0);
  std::size_t o = 0;
  for (int i = 0; i < x.n; ++i) {
    for (int c = 0; c < x.c; ++c) {
      for (int yy = 0; yy < y.h; ++yy) {
        for (int xx = 0; xx < y.w; ++xx, ++o) {
          int by = 2 * yy;
          int bx = 2 * xx;
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              if (x.at(i, c, 2 * yy + a, 2 * xx + b) > x.at(i, c, by, bx)) {
                by = 2 * yy + a;
                bx = 2 * xx + b;
              }
            }
          }
          y.data[o] = x.at(i, c, by, bx);
          argmax[o] = by * x.w + bx;
        }
      }
    }
  }
}

template <typename T>
void maxpool2_backward(const Tensor<T>& dy, const std::vector<int>& argmax, Tensor<T>& dx) {
  require(argmax.size() == dy.size(), "maxpool argmax size mismatch");
  dx = Tensor<T>(dy.n, dy.c, 2 * dy.h, 2 * dy.w);
  std::size_t o = 0;
  for (int i = 0; i < dy.n; ++i) {
    for (int c = 0; c < dy.c; ++c) {
      for (std::size_t k = 0; k < dy.plane(); ++k, ++o) dx.channel(i, c)[argmax[o]] += dy.data[o];
    }
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

}  // namespace trailkit::segnet::reference
