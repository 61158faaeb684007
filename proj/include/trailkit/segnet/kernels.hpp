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

// Compute kernels of the segmentation network, in two interchangeable
// flavours with identical signatures:
//
//   kernels::    im2col + GEMM with OpenMP-parallel data movement; used by
//                the network.
//   reference::  direct serial loops; kept as the oracle for kernel tests
//                and as the baseline of the kernel benchmark.
//
// Weight layouts (row-major):
//   conv2d     [cout][cin][k][k], stride 1, zero padding `pad`
//   upconv2x2  [cout][2][2][cin], transposed conv with kernel 2 and stride 2
//
// Backward functions accumulate (+=) into dweight / dbias and overwrite dx.
// An empty bias span means "no bias".

#include <span>
#include <vector>

#include "trailkit/segnet/tensor.hpp"

namespace trailkit::segnet {

#define TRAILKIT_DECLARE_KERNELS                                                                                  \
  template <typename T>                                                                                          \
  void conv2d_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout, int k,    \
                      int pad, Tensor<T>& y);                                                                    \
  template <typename T>                                                                                          \
  void conv2d_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, int k, int pad,        \
                       Tensor<T>* dx, std::span<T> dweight, std::span<T> dbias);                                 \
  template <typename T>                                                                                          \
  void upconv2x2_forward(const Tensor<T>& x, std::span<const T> weight, std::span<const T> bias, int cout,        \
                         Tensor<T>& y);                                                                          \
  template <typename T>                                                                                          \
  void upconv2x2_backward(const Tensor<T>& x, std::span<const T> weight, const Tensor<T>& dy, Tensor<T>& dx,      \
                          std::span<T> dweight, std::span<T> dbias);                                             \
  template <typename T>                                                                                          \
  void maxpool2_forward(const Tensor<T>& x, Tensor<T>& y, std::vector<int>& argmax);                             \
  template <typename T>                                                                                          \
  void maxpool2_backward(const Tensor<T>& dy, const std::vector<int>& argmax, Tensor<T>& dx);

namespace kernels {
TRAILKIT_DECLARE_KERNELS
}  // namespace kernels

namespace reference {
TRAILKIT_DECLARE_KERNELS
}  // namespace reference

#undef TRAILKIT_DECLARE_KERNELS

}  // namespace trailkit::segnet
