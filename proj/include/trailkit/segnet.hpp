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
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "trailkit/raster.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::segnet {

/// U-Net shape. Encoder level i has base_channels * 2^i channels; the
/// bottleneck sits below level depth-1.
struct NetConfig {
  int depth = 4;
  int base_channels = 16;
  int input_size = 256;
  bool skip_connections = true;
  std::uint64_t param_seed = 1;

  void validate() const;
};

/// One named tensor of the network. Running BatchNorm statistics are stored
/// alongside the trainable tensors with trainable = false.
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<float> value;
  bool trainable = true;
};

struct NetworkParams {
  NetConfig config;
  std::vector<Param> params;

  /// Number of trainable scalars.
  std::size_t parameter_count() const;
  const Param& find(const std::string& name) const;
};

NetworkParams build_network(const NetConfig& config);

enum class LossKind { kBce, kDice, kBceDice };
std::string to_string(LossKind kind);
LossKind parse_loss(const std::string& s);

enum Augmentation : unsigned {
  kAugNone = 0,
  kAugRotation = 1u << 0,
  kAugFlip = 1u << 1,
  kAugTranslation = 1u << 2,
  kAugAll = kAugRotation | kAugFlip | kAugTranslation,
};

struct TrainRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_iou = 0.0;
  double wall_clock_s = 0.0;  ///< cumulative since the start of this run
};

struct TrainConfig {
  int batch_size = 2;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 139;
  int patience = 20;  ///< early-stopping patience on validation loss; <= 0 disables
  LossKind loss = LossKind::kBceDice;
  unsigned augmentation = kAugAll;
  int max_translation = 16;  ///< pixels
  double iou_threshold = 0.5;
  std::uint64_t seed = 1;
  int first_epoch = 1;  ///< epoch number of the first epoch run; > 1 when resuming
  double time_budget_s = 0.0;  ///< stop after the epoch that crosses it; <= 0 disables

  void validate() const;
};

struct TrainResult {
  NetworkParams params;  ///< parameters at the best validation loss
  NetworkParams last;    ///< parameters after the final epoch
  std::vector<TrainRecord> records;
  int best_epoch = 0;
};

using EpochCallback = std::function<void(const TrainRecord&, const NetworkParams& last)>;

/// Trains on already-normalised-or-raw samples (normalisation is applied
/// internally). Throws kPrecondition on empty splits and kNumeric on a
/// non-finite loss.
TrainResult train(const NetworkParams& net, std::span<const sim::Sample> train_set,
                  std::span<const sim::Sample> val_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Loads the train and validation entries of a manifest rooted at `root`.
TrainResult train(const NetworkParams& net, const sim::DatasetManifest& manifest, const std::filesystem::path& root,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Robust per-tile scaling: (x - median) / (1.4826 MAD), clipped to [-5, 20].
Raster normalize_tile(const Raster& tile);

/// Per-pixel trail probability in (0, 1). The tile is normalised internally.
Raster segment(const NetworkParams& net, const Raster& tile);

/// Batched form of segment(); all tiles must be input_size square.
std::vector<Raster> segment_batch(const NetworkParams& net, std::span<const Raster> tiles);

/// True exactly where prob > threshold.
BinaryMask binarize(const Raster& prob, double threshold);

/// Binary checkpoint, layout documented in checkpoint.cpp.
void save_checkpoint(const NetworkParams& net, int epoch, const std::filesystem::path& path);
NetworkParams load_checkpoint(const std::filesystem::path& path, int* epoch = nullptr);

std::string format_train_record(const TrainRecord& r);
TrainRecord parse_train_record(const std::string& line);
void append_train_log(const std::filesystem::path& path, const TrainRecord& r);
std::vector<TrainRecord> read_train_log(const std::filesystem::path& path);

}  // namespace trailkit::segnet
