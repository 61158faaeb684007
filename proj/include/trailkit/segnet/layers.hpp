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

// Network layers. Layers do not own their inputs: forward() and backward()
// both receive the layer input, and the caller keeps it alive in between.

#include <span>
#include <string>
#include <vector>

#include "trailkit/segnet/tensor.hpp"

namespace trailkit::segnet {

template <typename T>
struct ParamSlot {
  std::string name;
  std::vector<int> shape;
  std::vector<T> value;
  std::vector<T> grad;  ///< empty for non-trainable slots
  bool trainable = true;
};

template <typename T>
class ParamStore {
 public:
  int add(std::string name, std::vector<int> shape, bool trainable);
  ParamSlot<T>& operator[](int i) { return slots_[static_cast<std::size_t>(i)]; }
  const ParamSlot<T>& operator[](int i) const { return slots_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return slots_.size(); }
  std::vector<ParamSlot<T>>& slots() { return slots_; }
  const std::vector<ParamSlot<T>>& slots() const { return slots_; }
  void zero_grad();

 private:
  std::vector<ParamSlot<T>> slots_;
};

/// Stride-1 'same' convolution, optional bias.
template <typename T>
class Conv {
 public:
  Conv() = default;
  Conv(ParamStore<T>& store, const std::string& name, int cin, int cout, int k, bool bias);

  void forward(const Tensor<T>& x, Tensor<T>& y) const;
  void backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>* dx);

  int cin = 0;
  int cout = 0;
  int k = 0;
  int weight = -1;
  int bias = -1;

 private:
  ParamStore<T>* store_ = nullptr;
};

/// Transposed 2x2 convolution with stride 2 and bias.
template <typename T>
class UpConv {
 public:
  UpConv() = default;
  UpConv(ParamStore<T>& store, const std::string& name, int cin, int cout);

  void forward(const Tensor<T>& x, Tensor<T>& y) const;
  void backward(const Tensor<T>& x, const Tensor<T>& dy, Tensor<T>& dx);

  int cin = 0;
  int cout = 0;
  int weight = -1;
  int bias = -1;

 private:
  ParamStore<T>* store_ = nullptr;
};

/// Per-channel batch normalisation. Training mode normalises with batch
/// statistics and updates the running estimates; evaluation mode uses the
/// running estimates.
template <typename T>
class BatchNorm {
 public:
  static constexpr double kEps = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm() = default;
  BatchNorm(ParamStore<T>& store, const std::string& name, int channels);

  void forward(const Tensor<T>& x, Tensor<T>& y, bool train);
  /// Valid only after a training-mode forward.
  void backward(const Tensor<T>& dy, Tensor<T>& dx);

  int channels = 0;
  int gamma = -1;
  int beta = -1;
  int running_mean = -1;
  int running_var = -1;

 private:
  ParamStore<T>* store_ = nullptr;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
};

template <typename T>
void relu_inplace(Tensor<T>& x);
/// dy *= (y > 0), where y is the ReLU output.
template <typename T>
void relu_backward_inplace(const Tensor<T>& y, Tensor<T>& dy);

/// Channel concatenation [a, b] and its adjoint.
template <typename T>
void concat_channels(const Tensor<T>& a, const Tensor<T>& b, Tensor<T>& out);
template <typename T>
void split_channels(const Tensor<T>& d, int ca, Tensor<T>& da, Tensor<T>& db);

/// conv-BN-ReLU twice.
template <typename T>
class DoubleConv {
 public:
  DoubleConv() = default;
  DoubleConv(ParamStore<T>& store, const std::string& name, int cin, int cout);

  const Tensor<T>& forward(const Tensor<T>& x, bool train);
  void backward(const Tensor<T>& x, const Tensor<T>& dout, Tensor<T>* dx);
  const Tensor<T>& output() const { return out_; }

 private:
  Conv<T> conv1_, conv2_;
  BatchNorm<T> bn1_, bn2_;
  Tensor<T> a_, r1_, out_;
  Tensor<T> g1_, g2_;
};

}  // namespace trailkit::segnet
