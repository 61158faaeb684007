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

#include <cmath>

#include "trailkit/error.hpp"
#include "trailkit/segnet/unet.hpp"

namespace trailkit::segnet {
namespace {

constexpr double kDiceSmooth = 1.0;

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

}  // namespace

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::kBce: return "bce";
    case LossKind::kDice: return "dice";
    case LossKind::kBceDice: return "bce+dice";
  }
  return "bce+dice";
}

LossKind parse_loss(const std::string& s) {
  if (s == "bce") return LossKind::kBce;
  if (s == "dice") return LossKind::kDice;
  if (s == "bce+dice" || s == "bce_dice") return LossKind::kBceDice;
  fail(ErrorCategory::kConfig, "unknown loss '" + s + "' (expected bce, dice or bce+dice)");
}

template <typename T>
double loss_and_grad(const Tensor<T>& logits, const Tensor<T>& target, LossKind kind, Tensor<T>* dlogits) {
  require(logits.same_shape(target), "loss target shape mismatch");
  const std::size_t n = logits.size();
  require(n > 0, "loss of an empty batch");
  const bool use_bce = kind != LossKind::kDice;
  const bool use_dice = kind != LossKind::kBce;
  if (dlogits && !dlogits->same_shape(logits)) *dlogits = Tensor<T>(logits.n, logits.c, logits.h, logits.w);

  double bce = 0.0;
  double inter = 0.0;
  double sum_p = 0.0;
  double sum_t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = logits.data[i];
    const double t = target.data[i];
    if (use_bce) bce += std::max(z, 0.0) - t * z + std::log1p(std::exp(-std::abs(z)));
    if (use_dice) {
      const double p = sigmoid(z);
      inter += p * t;
      sum_p += p;
      sum_t += t;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  if (use_bce) loss += bce * inv_n;
  const double den = sum_p + sum_t + kDiceSmooth;
  const double num = 2.0 * inter + kDiceSmooth;
  if (use_dice) loss += 1.0 - num / den;

  if (dlogits) {
    for (std::size_t i = 0; i < n; ++i) {
      const double z = logits.data[i];
      const double t = target.data[i];
      const double p = sigmoid(z);
      double g = 0.0;
      if (use_bce) g += (p - t) * inv_n;
      if (use_dice) g += -(2.0 * t * den - num) / (den * den) * p * (1.0 - p);
      dlogits->data[i] = static_cast<T>(g);
    }
  }
  return loss;
}

template double loss_and_grad<float>(const Tensor<float>&, const Tensor<float>&, LossKind, Tensor<float>*);
template double loss_and_grad<double>(const Tensor<double>&, const Tensor<double>&, LossKind, Tensor<double>*);

}  // namespace trailkit::segnet
