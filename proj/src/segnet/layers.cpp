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

#include "trailkit/segnet/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trailkit/error.hpp"
#include "trailkit/segnet/kernels.hpp"

namespace trailkit::segnet {
namespace {

template <typename T>
std::span<const T> cspan(const std::vector<T>& v) {
  return {v.data(), v.size()};
}

}  // namespace

template <typename T>
int ParamStore<T>::add(std::string name, std::vector<int> shape, bool trainable) {
  const auto count = static_cast<std::size_t>(std::accumulate(shape.begin(), shape.end(), 1L, std::multiplies<>()));
  ParamSlot<T> s;
  s.name = std::move(name);
  s.shape = std::move(shape);
  s.value.assign(count, T(0));
  if (trainable) s.grad.assign(count, T(0));
  s.trainable = trainable;
  slots_.push_back(std::move(s));
  return static_cast<int>(slots_.size() - 1);
}

template <typename T>
void ParamStore<T>::zero_grad() {
  for (auto& s : slots_) std::fill(s.grad.begin(), s.grad.end(), T(0));
}

template <typename T>
Conv<T>::Conv(ParamStore<T>& store, const std::string& name, int cin_, int cout_, int k_, bool with_bias)
    : cin(cin_), cout(cout_), k(k_), store_(&store) {
  weight = store.add(name + ".weight", {cout, cin, k, k}, true);
  if (with_bias) bias = store.add(name + ".bias", {cout}, true);
}

template <typename T>
void Conv<T>::forward(const Tensor<T>& x, Tensor<T>& y) const {
  const auto& s = *store_;
  kernels::conv2d_forward<T>(x, cspan(s[weight].value), bias < 0 ? std::span<const T>{} : cspan(s[bias].value),
                             cout, k, (k - 1) / 2, y);
}

template <typename T>
void Conv<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>* dx) {
  auto& s = *store_;
  kernels::conv2d_backward<T>(x, cspan(s[weight].value), dy, k, (k - 1) / 2, dx, s[weight].grad,
                              bias < 0 ? std::span<T>{} : std::span<T>(s[bias].grad));
}

template <typename T>
UpConv<T>::UpConv(ParamStore<T>& store, const std::string& name, int cin_, int cout_)
    : cin(cin_), cout(cout_), store_(&store) {
  weight = store.add(name + ".weight", {cout, 2, 2, cin}, true);
  bias = store.add(name + ".bias", {cout}, true);
}

template <typename T>
void UpConv<T>::forward(const Tensor<T>& x, Tensor<T>& y) const {
  const auto& s = *store_;
  kernels::upconv2x2_forward<T>(x, cspan(s[weight].value), cspan(s[bias].value), cout, y);
}

template <typename T>
void UpConv<T>::backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>& dx) {
  auto& s = *store_;
  kernels::upconv2x2_backward<T>(x, cspan(s[weight].value), dy, dx, s[weight].grad, s[bias].grad);
}

template <typename T>
BatchNorm<T>::BatchNorm(ParamStore<T>& store, const std::string& name, int c) : channels(c), store_(&store) {
  gamma = store.add(name + ".gamma", {c}, true);
  beta = store.add(name + ".beta", {c}, true);
  running_mean = store.add(name + ".running_mean", {c}, false);
  running_var = store.add(name + ".running_var", {c}, false);
  std::fill(store[gamma].value.begin(), store[gamma].value.end(), T(1));
  std::fill(store[running_var].value.begin(), store[running_var].value.end(), T(1));
}

template <typename T>
void BatchNorm<T>::forward(const Tensor<T>& x, Tensor<T>& y, bool train) {
  require(x.c == channels, "batchnorm channel mismatch");
  auto& s = *store_;
  if (!y.same_shape(x)) y = Tensor<T>(x.n, x.c, x.h, x.w);
  const std::size_t plane = x.plane();
  const double m = static_cast<double>(x.n) * static_cast<double>(plane);
  if (train) {
    if (!xhat_.same_shape(x)) xhat_ = Tensor<T>(x.n, x.c, x.h, x.w);
    inv_std_.assign(static_cast<std::size_t>(channels), T(0));
  }
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    double mean = 0.0;
    double var = 0.0;
    if (train) {
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.channel(i, c);
        for (std::size_t k = 0; k < plane; ++k) mean += p[k];
      }
      mean /= m;
      for (int i = 0; i < x.n; ++i) {
        const T* p = x.channel(i, c);
        for (std::size_t k = 0; k < plane; ++k) {
          const double d = p[k] - mean;
          var += d * d;
        }
      }
      var /= m;
      const double unbiased = m > 1.0 ? var * m / (m - 1.0) : var;
      s[running_mean].value[cu] =
          static_cast<T>((1.0 - kMomentum) * s[running_mean].value[cu] + kMomentum * mean);
      s[running_var].value[cu] =
          static_cast<T>((1.0 - kMomentum) * s[running_var].value[cu] + kMomentum * unbiased);
    } else {
      mean = s[running_mean].value[cu];
      var = s[running_var].value[cu];
    }
    const T inv = static_cast<T>(1.0 / std::sqrt(var + kEps));
    const T mu = static_cast<T>(mean);
    const T g = s[gamma].value[cu];
    const T b = s[beta].value[cu];
    if (train) inv_std_[cu] = inv;
    for (int i = 0; i < x.n; ++i) {
      const T* p = x.channel(i, c);
      T* q = y.channel(i, c);
      T* h = train ? xhat_.channel(i, c) : nullptr;
      for (std::size_t k = 0; k < plane; ++k) {
        const T xh = (p[k] - mu) * inv;
        if (h) h[k] = xh;
        q[k] = g * xh + b;
      }
    }
  }
}

template <typename T>
void BatchNorm<T>::backward(const Tensor<T>& dy, Tensor<T>& dx) {
  require(dy.same_shape(xhat_), "batchnorm backward without a matching training forward");
  auto& s = *store_;
  if (!dx.same_shape(dy)) dx = Tensor<T>(dy.n, dy.c, dy.h, dy.w);
  const std::size_t plane = dy.plane();
  const double m = static_cast<double>(dy.n) * static_cast<double>(plane);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    double sum_dy = 0.0;
    double sum_dy_xh = 0.0;
    for (int i = 0; i < dy.n; ++i) {
      const T* g = dy.channel(i, c);
      const T* h = xhat_.channel(i, c);
      for (std::size_t k = 0; k < plane; ++k) {
        sum_dy += g[k];
        sum_dy_xh += static_cast<double>(g[k]) * h[k];
      }
    }
    s[gamma].grad[cu] += static_cast<T>(sum_dy_xh);
    s[beta].grad[cu] += static_cast<T>(sum_dy);
    const T scale = s[gamma].value[cu] * inv_std_[cu];
    const T mean_dy = static_cast<T>(sum_dy / m);
    const T mean_dy_xh = static_cast<T>(sum_dy_xh / m);
    for (int i = 0; i < dy.n; ++i) {
      const T* g = dy.channel(i, c);
      const T* h = xhat_.channel(i, c);
      T* d = dx.channel(i, c);
      for (std::size_t k = 0; k < plane; ++k) d[k] = scale * (g[k] - mean_dy - h[k] * mean_dy_xh);
    }
  }
}

template <typename T>
void relu_inplace(Tensor<T>& x) {
  T* p = x.data.data();
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) p[i] = p[i] > T(0) ? p[i] : T(0);
}

template <typename T>
void relu_backward_inplace(const Tensor<T>& y, Tensor<T>& dy) {
  const T* p = y.data.data();
  T* g = dy.data.data();
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!(p[i] > T(0))) g[i] = T(0);
  }
}

template <typename T>
void concat_channels(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& out) {
  require(a.n == b.n && a.h == b.h && a.w == b.w, "concat shape mismatch");
  if (out.n != a.n || out.c != a.c + b.c || out.h != a.h || out.w != a.w) out = Tensor<T>(a.n, a.c + b.c, a.h, a.w);
  for (int i = 0; i < a.n; ++i) {
    std::copy(a.sample(i), a.sample(i) + a.sample_stride(), out.sample(i));
    std::copy(b.sample(i), b.sample(i) + b.sample_stride(), out.sample(i) + a.sample_stride());
  }
}

template <typename T>
void split_channels(const Tensor<T>& d, int ca, Tensor<T>& da, Tensor<T>& db) {
  const int cb = d.c - ca;
  if (da.n != d.n || da.c != ca || da.h != d.h || da.w != d.w) da = Tensor<T>(d.n, ca, d.h, d.w);
  if (db.n != d.n || db.c != cb || db.h != d.h || db.w != d.w) db = Tensor<T>(d.n, cb, d.h, d.w);
  for (int i = 0; i < d.n; ++i) {
    std::copy(d.sample(i), d.sample(i) + da.sample_stride(), da.sample(i));
    std::copy(d.sample(i) + da.sample_stride(), d.sample(i) + d.sample_stride(), db.sample(i));
  }
}

template <typename T>
DoubleConv<T>::DoubleConv(ParamStore<T>& store, const std::string& name, int cin, int cout)
    : conv1_(store, name + ".conv1", cin, cout, 3, false),
      conv2_(store, name + ".conv2", cout, cout, 3, false),
      bn1_(store, name + ".bn1", cout),
      bn2_(store, name + ".bn2", cout) {}

template <typename T>
const Tensor<T>& DoubleConv<T>::forward(const Tensor<T>& x, bool train) {
  conv1_.forward(x, a_);
  bn1_.forward(a_, r1_, train);
  relu_inplace(r1_);
  conv2_.forward(r1_, a_);
  bn2_.forward(a_, out_, train);
  relu_inplace(out_);
  return out_;
}

template <typename T>
void DoubleConv<T>::backward(const Tensor<T>& x, const Tensor<T>& dout, Tensor<T>* dx) {
  g1_ = dout;
  relu_backward_inplace(out_, g1_);
  bn2_.backward(g1_, g2_);
  conv2_.backward(r1_, g2_, &g1_);
  relu_backward_inplace(r1_, g1_);
  bn1_.backward(g1_, g2_);
  conv1_.backward(x, g2_, dx);
}

#define TRAILKIT_INSTANTIATE(T)                                                          \
  template class ParamStore<T>;                                                          \
  template class Conv<T>;                                                                \
  template class UpConv<T>;                                                              \
  template class BatchNorm<T>;                                                           \
  template class DoubleConv<T>;                                                          \
  template void relu_inplace<T>(Tensor<T>&);                                             \
  template void relu_backward_inplace<T>(const Tensor<T>&, Tensor<T>&);                  \
  template void concat_channels<T>(const Tensor<T>&, const Tensor<T>&, Tensor<T>&);      \
  template void split_channels<T>(const Tensor<T>&, int, Tensor<T>&, Tensor<T>&);

TRAILKIT_INSTANTIATE(float)
TRAILKIT_INSTANTIATE(double)
#undef TRAILKIT_INSTANTIATE

}  // namespace trailkit::segnet
