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

#include "trailkit/segnet/unet.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trailkit/error.hpp"
#include "trailkit/segnet/kernels.hpp"

namespace trailkit::segnet {
namespace {

// Prior probability of the trail class used to initialise the head bias.
constexpr double kTrailPrior = 0.01;

int channels_at(const NetConfig& c, int level) { return c.base_channels << level; }

float median_inplace(std::vector<float>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5f * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

void NetConfig::validate() const {
  if (depth < 1 || depth > 8) fail(ErrorCategory::kConfig, "network depth must lie in [1, 8]");
  if (base_channels < 1) fail(ErrorCategory::kConfig, "base_channels must be >= 1");
  if (!skip_connections) fail(ErrorCategory::kConfig, "the U-Net requires skip connections");
  if (input_size < 1 || input_size % (1 << depth) != 0) {
    fail(ErrorCategory::kConfig, "input_size " + std::to_string(input_size) + " is not divisible by 2^depth = " +
                                     std::to_string(1 << depth));
  }
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params) {
    if (p.trainable) n += p.value.size();
  }
  return n;
}

const Param& NetworkParams::find(const std::string& name) const {
  for (const auto& p : params) {
    if (p.name == name) return p;
  }
  fail(ErrorCategory::kPrecondition, "no parameter named " + name);
}

template <typename T>
UNet<T>::UNet(const NetConfig& config) : config_(config), store_(std::make_unique<ParamStore<T>>()) {
  config_.validate();
  auto& s = *store_;
  int cin = 1;
  for (int i = 0; i < config_.depth; ++i) {
    enc_.emplace_back(s, "enc" + std::to_string(i), cin, channels_at(config_, i));
    cin = channels_at(config_, i);
  }
  bottleneck_ = DoubleConv<T>(s, "bottleneck", cin, channels_at(config_, config_.depth));
  up_.resize(static_cast<std::size_t>(config_.depth));
  dec_.resize(static_cast<std::size_t>(config_.depth));
  for (int i = config_.depth - 1; i >= 0; --i) {
    const int c = channels_at(config_, i);
    up_[static_cast<std::size_t>(i)] = UpConv<T>(s, "up" + std::to_string(i), channels_at(config_, i + 1), c);
    dec_[static_cast<std::size_t>(i)] = DoubleConv<T>(s, "dec" + std::to_string(i), 2 * c, c);
  }
  head_ = Conv<T>(s, "head", channels_at(config_, 0), 1, 1, true);
  pooled_.resize(static_cast<std::size_t>(config_.depth));
  argmax_.resize(static_cast<std::size_t>(config_.depth));
  upsampled_.resize(static_cast<std::size_t>(config_.depth));
  concat_.resize(static_cast<std::size_t>(config_.depth));
}

template <typename T>
UNet<T>::UNet(const NetworkParams& params) : UNet(params.config) {
  import_params(params);
}

template <typename T>
void UNet<T>::import_params(const NetworkParams& params) {
  auto& slots = store_->slots();
  if (params.params.size() != slots.size()) {
    fail(ErrorCategory::kFormat, "parameter set has " + std::to_string(params.params.size()) +
                                     " tensors, network expects " + std::to_string(slots.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const Param& p = params.params[i];
    if (p.name != slots[i].name || p.value.size() != slots[i].value.size()) {
      fail(ErrorCategory::kFormat, "parameter '" + p.name + "' does not match network tensor '" + slots[i].name + "'");
    }
    std::copy(p.value.begin(), p.value.end(), slots[i].value.begin());
  }
}

template <typename T>
NetworkParams UNet<T>::export_params() const {
  NetworkParams out;
  out.config = config_;
  for (const auto& s : store_->slots()) {
    Param p;
    p.name = s.name;
    p.shape = s.shape;
    p.trainable = s.trainable;
    p.value.assign(s.value.begin(), s.value.end());
    out.params.push_back(std::move(p));
  }
  return out;
}

template <typename T>
const Tensor<T>& UNet<T>::forward(const Tensor<T>& x, bool train) {
  require(x.c == 1, "network input must have one channel");
  if (x.h != config_.input_size || x.w != config_.input_size) {
    fail(ErrorCategory::kPrecondition, "network input is " + std::to_string(x.w) + "x" + std::to_string(x.h) +
                                           ", expected " + std::to_string(config_.input_size) + " square");
  }
  input_ = x;
  const Tensor<T>* cur = &input_;
  for (int i = 0; i < config_.depth; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const Tensor<T>& e = enc_[iu].forward(*cur, train);
    kernels::maxpool2_forward(e, pooled_[iu], argmax_[iu]);
    cur = &pooled_[iu];
  }
  cur = &bottleneck_.forward(*cur, train);
  for (int i = config_.depth - 1; i >= 0; --i) {
    const auto iu = static_cast<std::size_t>(i);
    up_[iu].forward(*cur, upsampled_[iu]);
    concat_channels(enc_[iu].output(), upsampled_[iu], concat_[iu]);
    cur = &dec_[iu].forward(concat_[iu], train);
  }
  head_.forward(*cur, logits_);
  return logits_;
}

template <typename T>
void UNet<T>::backward(const Tensor<T>& dlogits) {
  require(dlogits.same_shape(logits_), "logit gradient shape mismatch");
  const auto depth = static_cast<std::size_t>(config_.depth);
  Tensor<T> g, gcat, gup;
  std::vector<Tensor<T>> gskip(depth);
  head_.backward(dec_[0].output(), dlogits, &g);
  for (std::size_t i = 0; i < depth; ++i) {
    dec_[i].backward(concat_[i], g, &gcat);
    split_channels(gcat, enc_[i].output().c, gskip[i], gup);
    const Tensor<T>& below = i + 1 < depth ? dec_[i + 1].output() : bottleneck_.output();
    up_[i].backward(below, gup, g);
  }
  Tensor<T> ge;
  bottleneck_.backward(pooled_[depth - 1], g, &g);
  for (std::size_t k = depth; k-- > 0;) {
    const Tensor<T>& e = enc_[k].output();
    ge = Tensor<T>(e.n, e.c, e.h, e.w);
    kernels::maxpool2_backward(g, argmax_[k], ge);
    for (std::size_t j = 0; j < ge.size(); ++j) ge.data[j] += gskip[k].data[j];
    const Tensor<T>& in = k == 0 ? input_ : pooled_[k - 1];
    enc_[k].backward(in, ge, k == 0 ? nullptr : &g);
  }
}

template class UNet<float>;
template class UNet<double>;

NetworkParams build_network(const NetConfig& config) {
  UNet<float> net(config);
  std::mt19937_64 rng(config.param_seed);
  for (auto& s : net.store().slots()) {
    const bool is_weight = s.name.size() > 7 && s.name.compare(s.name.size() - 7, 7, ".weight") == 0;
    if (!is_weight) continue;
    const bool is_up = s.name.rfind("up", 0) == 0;
    const bool is_head = s.name.rfind("head", 0) == 0;
    // conv: [cout, cin, k, k]; upconv: [cout, 2, 2, cin].
    const int fan_in = is_up ? s.shape[3] : s.shape[1] * s.shape[2] * s.shape[3];
    const double gain = (is_up || is_head) ? 1.0 : 2.0;
    std::normal_distribution<double> dist(0.0, std::sqrt(gain / fan_in));
    for (auto& v : s.value) v = static_cast<float>(dist(rng));
  }
  for (auto& s : net.store().slots()) {
    if (s.name == "head.bias") s.value[0] = static_cast<float>(std::log(kTrailPrior / (1.0 - kTrailPrior)));
  }
  return net.export_params();
}

Raster normalize_tile(const Raster& tile) {
  require(!tile.empty(), "cannot normalise an empty tile");
  std::vector<float> v(tile.pixels().begin(), tile.pixels().end());
  const float med = median_inplace(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(tile.pixels()[i] - med);
  const double mad = median_inplace(v);
  const double scale = mad > 1e-12 ? 1.0 / (1.4826 * mad) : 1.0;
  Raster out(tile.width(), tile.height());
  auto src = tile.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = static_cast<float>(std::clamp((src[i] - med) * scale, -5.0, 20.0));
  }
  return out;
}

void tile_to_tensor(const Raster& tile, float* dst) {
  std::copy(tile.pixels().begin(), tile.pixels().end(), dst);
}

std::vector<Raster> segment_batch(const NetworkParams& net, std::span<const Raster> tiles) {
  std::vector<Raster> out;
  if (tiles.empty()) return out;
  const int size = net.config.input_size;
  Tensor<float> x(static_cast<int>(tiles.size()), 1, size, size);
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (tiles[i].width() != size || tiles[i].height() != size) {
      fail(ErrorCategory::kPrecondition, "tile is " + std::to_string(tiles[i].width()) + "x" +
                                             std::to_string(tiles[i].height()) + ", network expects " +
                                             std::to_string(size) + " square");
    }
    tile_to_tensor(normalize_tile(tiles[i]), x.sample(static_cast<int>(i)));
  }
  UNet<float> model(net);
  const Tensor<float>& logits = model.forward(x, false);
  constexpr double kLo = 1e-6;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    Raster prob(size, size);
    const float* z = logits.sample(static_cast<int>(i));
    auto p = prob.pixels();
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double s = 1.0 / (1.0 + std::exp(-static_cast<double>(z[k])));
      p[k] = static_cast<float>(std::clamp(s, kLo, 1.0 - kLo));
    }
    out.push_back(std::move(prob));
  }
  return out;
}

Raster segment(const NetworkParams& net, const Raster& tile) {
  return std::move(segment_batch(net, std::span<const Raster>(&tile, 1)).front());
}

BinaryMask binarize(const Raster& prob, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, "binarisation threshold must lie in (0, 1)");
  BinaryMask m(prob.width(), prob.height());
  auto bits = m.bits();
  auto p = prob.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) bits[i] = p[i] > threshold ? 1 : 0;
  return m;
}

}  // namespace trailkit::segnet
