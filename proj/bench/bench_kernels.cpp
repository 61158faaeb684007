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


// Parallel kernels against the serial reference loops.

#include <benchmark/benchmark.h>

#include <random>

#include "trailkit/segnet.hpp"
#include "trailkit/segnet/kernels.hpp"

using namespace trailkit::segnet;

namespace {

Tensor<float> random_tensor(int n, int c, int h, int w, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> g(0.0f, 1.0f);
  Tensor<float> t(n, c, h, w);
  for (auto& v : t.data) v = g(rng);
  return t;
}

std::vector<float> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<float> g(0.0f, 0.1f);
  std::vector<float> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

// Args: channels, side.
template <bool Parallel>
void BM_Conv3x3Forward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const auto x = random_tensor(2, c, s, s, 1);
  const auto w = random_vector(static_cast<std::size_t>(c) * c * 9, 2);
  Tensor<float> y;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::conv2d_forward<float>(x, w, {}, c, 3, 1, y);
    } else {
      reference::conv2d_forward<float>(x, w, {}, c, 3, 1, y);
    }
    benchmark::DoNotOptimize(y.data.data());
  }
  state.SetItemsProcessed(state.iterations() * 2LL * c * c * 9 * s * s);
}

template <bool Parallel>
void BM_Conv3x3Backward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const auto x = random_tensor(2, c, s, s, 3);
  const auto dy = random_tensor(2, c, s, s, 4);
  const auto w = random_vector(static_cast<std::size_t>(c) * c * 9, 5);
  std::vector<float> dw(w.size());
  Tensor<float> dx;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::conv2d_backward<float>(x, w, dy, 3, 1, &dx, dw, {});
    } else {
      reference::conv2d_backward<float>(x, w, dy, 3, 1, &dx, dw, {});
    }
    benchmark::DoNotOptimize(dx.data.data());
  }
}

template <bool Parallel>
void BM_UpConvForward(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const auto x = random_tensor(2, c, s, s, 6);
  const auto w = random_vector(static_cast<std::size_t>(c / 2) * 4 * c, 7);
  const auto b = random_vector(static_cast<std::size_t>(c / 2), 8);
  Tensor<float> y;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::upconv2x2_forward<float>(x, w, b, c / 2, y);
    } else {
      reference::upconv2x2_forward<float>(x, w, b, c / 2, y);
    }
    benchmark::DoNotOptimize(y.data.data());
  }
}

template <bool Parallel>
void BM_MaxPool(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), s = static_cast<int>(state.range(1));
  const auto x = random_tensor(2, c, s, s, 9);
  Tensor<float> y;
  std::vector<int> argmax;
  for (auto _ : state) {
    if constexpr (Parallel) {
      kernels::maxpool2_forward<float>(x, y, argmax);
    } else {
      reference::maxpool2_forward<float>(x, y, argmax);
    }
    benchmark::DoNotOptimize(y.data.data());
  }
}

void BM_SegmentTile(benchmark::State& state) {
  const NetworkParams net = build_network(NetConfig{});
  trailkit::Raster tile(256, 256);
  std::mt19937 rng(10);
  std::normal_distribution<float> g(200.0f, 15.0f);
  for (float& v : tile.pixels()) v = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(segment(net, tile));
}

}  // namespace

BENCHMARK_TEMPLATE(BM_Conv3x3Forward, true)->Args({16, 128})->Args({64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Conv3x3Forward, false)->Args({16, 128})->Args({64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Conv3x3Backward, true)->Args({16, 128})->Args({64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_Conv3x3Backward, false)->Args({16, 128})->Args({64, 32})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_UpConvForward, true)->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_UpConvForward, false)->Args({32, 64})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_MaxPool, true)->Args({16, 256})->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_MaxPool, false)->Args({16, 256})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SegmentTile)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
