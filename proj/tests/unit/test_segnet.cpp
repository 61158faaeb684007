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
#include <fstream>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "trailkit/error.hpp"
#include "trailkit/segnet.hpp"
#include "trailkit/segnet/kernels.hpp"
#include "trailkit/segnet/unet.hpp"

using namespace trailkit;
using namespace trailkit::segnet;

namespace {

template <typename T>
Tensor<T> random_tensor(std::mt19937_64& rng, int n, int c, int h, int w) {
  Tensor<T> t(n, c, h, w);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (auto& v : t.data) v = static_cast<T>(nd(rng));
  return t;
}

template <typename T>
std::vector<T> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::vector<T> v(n);
  std::normal_distribution<double> nd(0.0, 0.5);
  for (auto& x : v) x = static_cast<T>(nd(rng));
  return v;
}

template <typename T>
double max_rel_diff(const std::vector<T>& a, const std::vector<T>& b) {
  REQUIRE(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(static_cast<double>(a[i]) - b[i]);
    worst = std::max(worst, d / std::max(1.0, std::abs(static_cast<double>(b[i]))));
  }
  return worst;
}

// Trainable scalars of a U-Net in closed form; conv-only when `conv_only`.
std::size_t closed_form_count(int depth, int base, bool conv_only = false) {
  auto ch = [&](int i) { return static_cast<std::size_t>(base) << i; };
  auto dc = [&](std::size_t cin, std::size_t cout) {
    return 9 * cin * cout + 9 * cout * cout + (conv_only ? 0 : 4 * cout);
  };
  std::size_t n = dc(1, ch(0));
  for (int i = 1; i < depth; ++i) n += dc(ch(i - 1), ch(i));
  n += dc(ch(depth - 1), ch(depth));
  for (int i = 0; i < depth; ++i) {
    n += 4 * ch(i + 1) * ch(i) + (conv_only ? 0 : ch(i));
    n += dc(2 * ch(i), ch(i));
  }
  n += ch(0) + (conv_only ? 0 : 1);
  return n;
}

Raster trail_tile(int size, std::uint64_t seed) {
  Raster img(size, size, 100.0f);
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> nd(0.0f, 10.0f);
  for (float& v : img.pixels()) v = std::max(0.0f, v + nd(rng));
  return img;
}

}  // namespace

TEST_CASE_TEMPLATE("parallel kernels agree with the serial reference", T, float, double) {
  std::mt19937_64 rng(42);
  const double tol = std::is_same_v<T, float> ? 1e-4 : 1e-11;
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 2, cin = 1 + trial, cout = 2 + trial % 3, h = 6 + 2 * trial, w = 8 + 2 * (trial % 3);
    const int k = trial % 3 == 2 ? 1 : 3;
    const int pad = (k - 1) / 2;
    const auto x = random_tensor<T>(rng, n, cin, h, w);
    const auto wt = random_vec<T>(rng, static_cast<std::size_t>(cout) * cin * k * k);
    const auto b = random_vec<T>(rng, static_cast<std::size_t>(cout));

    Tensor<T> y1, y2;
    kernels::conv2d_forward<T>(x, wt, b, cout, k, pad, y1);
    reference::conv2d_forward<T>(x, wt, b, cout, k, pad, y2);
    CHECK(max_rel_diff(y1.data, y2.data) < tol);
    kernels::conv2d_forward<T>(x, wt, {}, cout, k, pad, y1);
    reference::conv2d_forward<T>(x, wt, {}, cout, k, pad, y2);
    CHECK(max_rel_diff(y1.data, y2.data) < tol);

    const auto dy = random_tensor<T>(rng, n, cout, h, w);
    Tensor<T> dx1, dx2;
    std::vector<T> dw1(wt.size(), T(1)), dw2(wt.size(), T(1)), db1(b.size(), T(2)), db2(b.size(), T(2));
    kernels::conv2d_backward<T>(x, wt, dy, k, pad, &dx1, dw1, db1);
    reference::conv2d_backward<T>(x, wt, dy, k, pad, &dx2, dw2, db2);
    CHECK(max_rel_diff(dx1.data, dx2.data) < tol);
    CHECK(max_rel_diff(dw1, dw2) < tol);
    CHECK(max_rel_diff(db1, db2) < tol);

    const auto uw = random_vec<T>(rng, static_cast<std::size_t>(cout) * 4 * cin);
    kernels::upconv2x2_forward<T>(x, uw, b, cout, y1);
    reference::upconv2x2_forward<T>(x, uw, b, cout, y2);
    CHECK(max_rel_diff(y1.data, y2.data) < tol);
    const auto duy = random_tensor<T>(rng, n, cout, 2 * h, 2 * w);
    std::vector<T> duw1(uw.size()), duw2(uw.size()), dub1(b.size()), dub2(b.size());
    kernels::upconv2x2_backward<T>(x, uw, duy, dx1, duw1, dub1);
    reference::upconv2x2_backward<T>(x, uw, duy, dx2, duw2, dub2);
    CHECK(max_rel_diff(dx1.data, dx2.data) < tol);
    CHECK(max_rel_diff(duw1, duw2) < tol);
    CHECK(max_rel_diff(dub1, dub2) < tol);

    std::vector<int> a1, a2;
    kernels::maxpool2_forward<T>(x, y1, a1);
    reference::maxpool2_forward<T>(x, y2, a2);
    CHECK(y1.data == y2.data);
    CHECK(a1 == a2);
    const auto dpy = random_tensor<T>(rng, n, cin, h / 2, w / 2);
    kernels::maxpool2_backward<T>(dpy, a1, dx1);
    reference::maxpool2_backward<T>(dpy, a2, dx2);
    CHECK(dx1.data == dx2.data);
  }
}

TEST_CASE("analytic gradients match central differences") {
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 2;
  cfg.input_size = 8;
  cfg.param_seed = 3;
  UNet<double> m(build_network(cfg));
  std::mt19937_64 rng(5);
  const auto x = random_tensor<double>(rng, 2, 1, 8, 8);
  Tensor<double> t(2, 1, 8, 8);
  for (std::size_t i = 0; i < t.size(); ++i) t.data[i] = i % 5 == 0 ? 1.0 : 0.0;
  auto loss = [&]() { return loss_and_grad(m.forward(x, true), t, LossKind::kBceDice, static_cast<Tensor<double>*>(nullptr)); };

  Tensor<double> dz;
  loss_and_grad(m.forward(x, true), t, LossKind::kBceDice, &dz);
  m.store().zero_grad();
  m.backward(dz);

  auto& slots = m.store().slots();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    if (!slots[s].trainable) continue;
    for (std::size_t k = 0; k < slots[s].value.size(); ++k) all.emplace_back(s, k);
  }
  std::shuffle(all.begin(), all.end(), rng);
  REQUIRE(all.size() >= 100);
  double worst = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto [s, k] = all[i];
    const double g = slots[s].grad[k];
    const double v = slots[s].value[k];
    const double h = 1e-5;
    slots[s].value[k] = v + h;
    const double lp = loss();
    slots[s].value[k] = v - h;
    const double lm = loss();
    slots[s].value[k] = v;
    const double fd = (lp - lm) / (2.0 * h);
    worst = std::max(worst, std::abs(fd - g) / std::max({std::abs(fd), std::abs(g), 1e-8}));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("parameter count is the closed form") {
  CHECK(closed_form_count(4, 16) == 1942289);
  for (int depth : {1, 2, 3, 4}) {
    for (int base : {2, 4, 8, 16}) {
      NetConfig cfg;
      cfg.depth = depth;
      cfg.base_channels = base;
      cfg.input_size = 64;
      const NetworkParams p = build_network(cfg);
      std::size_t enumerated = 0;
      for (const Param& q : p.params) {
        if (!q.trainable) continue;
        std::size_t n = 1;
        for (int d : q.shape) n *= static_cast<std::size_t>(d);
        REQUIRE(n == q.value.size());
        enumerated += n;
      }
      CHECK(p.parameter_count() == closed_form_count(depth, base));
      CHECK(enumerated == closed_form_count(depth, base));
    }
  }
  const double ratio = static_cast<double>(closed_form_count(4, 32, true)) / closed_form_count(4, 16, true);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("builds are deterministic in the seed") {
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 4;
  cfg.input_size = 32;
  const NetworkParams a = build_network(cfg), b = build_network(cfg);
  REQUIRE(a.params.size() == b.params.size());
  for (std::size_t i = 0; i < a.params.size(); ++i) CHECK(a.params[i].value == b.params[i].value);
  cfg.param_seed = 2;
  const NetworkParams c = build_network(cfg);
  CHECK(a.find("enc0.conv1.weight").value != c.find("enc0.conv1.weight").value);

  cfg.input_size = 30;
  CHECK_THROWS_AS(build_network(cfg), Error);
}

TEST_CASE("untrained forward pass is a probability map") {
  NetConfig cfg;
  cfg.depth = 3;
  cfg.base_channels = 8;
  const NetworkParams net = build_network(cfg);
  for (const Raster& tile : {Raster(256, 256), trail_tile(256, 3)}) {
    const Raster p = segment(net, tile);
    CHECK(p.width() == 256);
    CHECK(p.height() == 256);
    for (float v : p.pixels()) REQUIRE((v > 0.0f && v < 1.0f));
  }
  const Raster again = segment(net, trail_tile(256, 3));
  const Raster first = segment(net, trail_tile(256, 3));
  CHECK(std::equal(again.pixels().begin(), again.pixels().end(), first.pixels().begin()));
  CHECK_THROWS_AS(segment(net, Raster(128, 128)), Error);
}

TEST_CASE("segment_batch matches segment") {
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 4;
  cfg.input_size = 32;
  const NetworkParams net = build_network(cfg);
  const std::vector<Raster> tiles = {trail_tile(32, 1), trail_tile(32, 2), trail_tile(32, 3)};
  const auto batch = segment_batch(net, tiles);
  REQUIRE(batch.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    const Raster one = segment(net, tiles[i]);
    for (std::size_t k = 0; k < one.size(); ++k) REQUIRE(batch[i].pixels()[k] == doctest::Approx(one.pixels()[k]));
  }
}

TEST_CASE("binarize") {
  CHECK(binarize(Raster(16, 16, 0.4f), 0.5).popcount() == 0);
  CHECK(binarize(Raster(16, 16, 0.6f), 0.5).popcount() == 256);
  std::mt19937_64 rng(8);
  Raster p(64, 48);
  for (float& v : p.pixels()) v = std::uniform_real_distribution<float>(0.0f, 1.0f)(rng);
  p(3, 3) = 0.5f;
  const BinaryMask m = binarize(p, 0.5);
  std::size_t expected = 0;
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      expected += p(x, y) > 0.5f;
      REQUIRE(m(x, y) == (p(x, y) > 0.5f));
    }
  }
  CHECK(m.popcount() == expected);
}

TEST_CASE("checkpoint round trip reproduces segment output bitwise") {
  trailkit::testing::TempDir dir;
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 4;
  cfg.input_size = 64;
  const NetworkParams net = build_network(cfg);
  save_checkpoint(net, 7, dir / "a.ckpt");
  int epoch = 0;
  const NetworkParams back = load_checkpoint(dir / "a.ckpt", &epoch);
  CHECK(epoch == 7);
  CHECK(back.config.depth == 2);
  CHECK(back.config.base_channels == 4);
  const Raster tile = trail_tile(64, 4);
  const Raster a = segment(net, tile), b = segment(back, tile);
  CHECK(std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin()));

  // A flipped payload byte fails the checksum.
  {
    std::fstream f(dir / "a.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-20, std::ios::end);
    f.put('\x55');
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "a.ckpt"), Error);
}

TEST_CASE("normalisation is robust and clipped") {
  std::mt19937_64 rng(3);
  Raster t(64, 64);
  std::normal_distribution<float> nd(500.0f, 20.0f);
  for (float& v : t.pixels()) v = nd(rng);
  t(10, 10) = 1e6f;
  t(11, 10) = 0.0f;
  const Raster n = normalize_tile(t);
  std::vector<float> v(n.pixels().begin(), n.pixels().end());
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  CHECK(std::abs(v[v.size() / 2]) < 0.05);
  CHECK(n(10, 10) == 20.0f);
  CHECK(n(11, 10) == -5.0f);
}

TEST_CASE("augmentation maps") {
  const int s = 8;
  std::vector<float> src(s * s);
  for (int i = 0; i < s * s; ++i) src[static_cast<std::size_t>(i)] = static_cast<float>(i);
  std::vector<float> a(src.size()), b(src.size());
  AugmentParams p;
  p.quarter_turns = 1;
  apply_augmentation(src, s, p, a);
  CHECK(a != src);
  std::vector<float> cur = src;
  for (int k = 0; k < 4; ++k) {
    apply_augmentation(cur, s, p, b);
    cur = b;
  }
  CHECK(cur == src);
  AugmentParams f;
  f.flip = true;
  apply_augmentation(src, s, f, a);
  apply_augmentation(a, s, f, b);
  CHECK(b == src);
  CHECK(a[0] == src[s - 1]);
}

TEST_CASE("losses") {
  Tensor<double> z(1, 1, 2, 2, 0.0), t(1, 1, 2, 2, 0.0);
  t.data = {1.0, 0.0, 1.0, 0.0};
  CHECK(loss_and_grad(z, t, LossKind::kBce, static_cast<Tensor<double>*>(nullptr)) == doctest::Approx(std::log(2.0)));
  // Soft Dice with smoothing 1: 1 - (2 * 1 + 1) / (2 + 2 + 1).
  CHECK(loss_and_grad(z, t, LossKind::kDice, static_cast<Tensor<double>*>(nullptr)) == doctest::Approx(1.0 - 3.0 / 5.0));
  CHECK(parse_loss(to_string(LossKind::kBceDice)) == LossKind::kBceDice);
  CHECK_THROWS_AS(parse_loss("hinge"), Error);
}

TEST_CASE("train log round trip") {
  trailkit::testing::TempDir dir;
  TrainRecord r{3, 0.25, 0.5, 0.75, 12.5};
  append_train_log(dir / "log", r);
  r.epoch = 4;
  append_train_log(dir / "log", r);
  const auto back = read_train_log(dir / "log");
  REQUIRE(back.size() == 2);
  CHECK(back[0].epoch == 3);
  CHECK(back[1].epoch == 4);
  CHECK(back[0].val_iou == doctest::Approx(0.75));
  CHECK(parse_train_record(format_train_record(r)).wall_clock_s == doctest::Approx(12.5));
}

namespace {

sim::Sample synthetic_sample(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  sim::TrailSpec spec = sim::random_trail_geometry(size, size, 2.5, rng());
  spec.peak_amplitude = 400.0;
  const auto r = sim::render_trail(Raster(size, size, 100.0f), spec, rng(), sim::NoiseMode::kPoisson);
  return {r.image, r.mask};
}

}  // namespace

TEST_CASE("one epoch on two images") {
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 4;
  cfg.input_size = 32;
  const std::vector<sim::Sample> tr = {synthetic_sample(32, 1)}, va = {synthetic_sample(32, 2)};
  TrainConfig tc;
  tc.max_epochs = 1;
  const TrainResult r = train(build_network(cfg), tr, va, tc);
  REQUIRE(r.records.size() == 1);
  CHECK(std::isfinite(r.records[0].train_loss));
  CHECK(std::isfinite(r.records[0].val_loss));
  CHECK(r.records[0].val_iou >= 0.0);
  CHECK(r.records[0].val_iou <= 1.0);
  CHECK_THROWS_AS(train(build_network(cfg), tr, std::span<const sim::Sample>{}, tc), Error);
}

TEST_CASE("memorises a single image in ten epochs") {
  NetConfig cfg;
  cfg.depth = 2;
  cfg.base_channels = 8;
  cfg.input_size = 64;
  // One image, repeated so that an epoch holds several optimiser steps.
  const std::vector<sim::Sample> one(16, synthetic_sample(64, 11));
  TrainConfig tc;
  tc.max_epochs = 10;
  tc.augmentation = kAugNone;
  tc.patience = 0;
  const TrainResult r = train(build_network(cfg), one, one, tc);
  const Raster p = segment(r.last, one[0].image);
  const double iou = mask_iou(binarize(p, 0.5), one[0].mask);
  MESSAGE("training IoU after 10 epochs: " << iou);
  CHECK(iou > 0.9);
}
