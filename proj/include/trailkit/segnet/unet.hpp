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

#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "trailkit/segnet.hpp"
#include "trailkit/segnet/layers.hpp"
#include "trailkit/segnet/tensor.hpp"

namespace trailkit::segnet {

/// Executable U-Net over a private copy of the parameters. Holds the
/// activations of the last forward pass, so one instance serves one thread.
template <typename T>
class UNet {
 public:
  /// Layout only: weights zero, BatchNorm at identity.
  explicit UNet(const NetConfig& config);
  explicit UNet(const NetworkParams& params);

  /// Logits, shape N x 1 x H x W.
  const Tensor<T>& forward(const Tensor<T>& x, bool train);
  /// Accumulates parameter gradients for the last (training) forward.
  void backward(const Tensor<T>& dlogits);

  ParamStore<T>& store() { return *store_; }
  const ParamStore<T>& store() const { return *store_; }
  const NetConfig& config() const { return config_; }
  NetworkParams export_params() const;
  /// Copies parameter values (not gradients) from `params`.
  void import_params(const NetworkParams& params);

 private:
  NetConfig config_;
  std::unique_ptr<ParamStore<T>> store_;
  std::vector<DoubleConv<T>> enc_;
  std::vector<DoubleConv<T>> dec_;
  std::vector<UpConv<T>> up_;
  DoubleConv<T> bottleneck_;
  Conv<T> head_;

  Tensor<T> input_;
  std::vector<Tensor<T>> pooled_;
  std::vector<std::vector<int>> argmax_;
  std::vector<Tensor<T>> upsampled_;
  std::vector<Tensor<T>> concat_;
  Tensor<T> logits_;
};

/// Scalar loss of logits against a 0/1 target of the same shape; writes
/// d(loss)/d(logits) when `dlogits` is non-null. Dice is the soft Dice over
/// the whole batch with smoothing 1.
template <typename T>
double loss_and_grad(const Tensor<T>& logits, const Tensor<T>& target, LossKind kind, Tensor<T>* dlogits);

/// Geometric augmentation of a square tile: translation with symmetric
/// reflection at the border, then rot90 quarter turns, then an x flip.
struct AugmentParams {
  int quarter_turns = 0;
  bool flip = false;
  int dx = 0;
  int dy = 0;
};

AugmentParams draw_augmentation(std::mt19937_64& rng, unsigned enabled, int max_translation);
void apply_augmentation(std::span<const float> src, int size, const AugmentParams& a, std::span<float> dst);

/// Writes the NCHW layout of a single-channel tile into `dst`.
void tile_to_tensor(const Raster& tile, float* dst);

}  // namespace trailkit::segnet
