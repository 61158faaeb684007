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
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "trailkit/error.hpp"
#include "trailkit/segnet/unet.hpp"

namespace trailkit::segnet {
namespace {

struct Prepared {
  std::vector<float> image;  ///< normalised
  std::vector<float> mask;   ///< 0 / 1
};

std::vector<Prepared> prepare(std::span<const sim::Sample> samples, int size) {
  std::vector<Prepared> out(samples.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const sim::Sample& s = samples[i];
    if (s.image.width() != size || s.image.height() != size || s.mask.width() != size || s.mask.height() != size) {
      continue;  // reported below, outside the parallel region
    }
    const Raster norm = normalize_tile(s.image);
    out[i].image.assign(norm.pixels().begin(), norm.pixels().end());
    out[i].mask.resize(norm.size());
    auto bits = s.mask.bits();
    for (std::size_t k = 0; k < bits.size(); ++k) out[i].mask[k] = bits[k] ? 1.0f : 0.0f;
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (out[i].image.empty()) {
      fail(ErrorCategory::kPrecondition, "training sample " + std::to_string(i) + " is not " + std::to_string(size) +
                                             " square or its mask does not match");
    }
  }
  return out;
}

struct Adam {
  std::vector<std::vector<float>> m, v;
  long step = 0;

  void update(ParamStore<float>& store, const TrainConfig& c) {
    auto& slots = store.slots();
    if (m.empty()) {
      m.resize(slots.size());
      v.resize(slots.size());
      for (std::size_t i = 0; i < slots.size(); ++i) {
        m[i].assign(slots[i].grad.size(), 0.0f);
        v[i].assign(slots[i].grad.size(), 0.0f);
      }
    }
    ++step;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(step));
    const float lr = static_cast<float>(c.learning_rate * std::sqrt(bc2) / bc1);
    const float b1 = static_cast<float>(c.beta1);
    const float b2 = static_cast<float>(c.beta2);
    const float eps = static_cast<float>(c.adam_eps * std::sqrt(bc2));
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!slots[i].trainable) continue;
      auto& val = slots[i].value;
      const auto& g = slots[i].grad;
      auto& mi = m[i];
      auto& vi = v[i];
      for (std::size_t k = 0; k < g.size(); ++k) {
        mi[k] = b1 * mi[k] + (1.0f - b1) * g[k];
        vi[k] = b2 * vi[k] + (1.0f - b2) * g[k] * g[k];
        val[k] -= lr * mi[k] / (std::sqrt(vi[k]) + eps);
      }
    }
  }
};

struct ValStats {
  double loss = 0.0;
  double iou = 0.0;
};

ValStats validate(UNet<float>& model, const std::vector<Prepared>& val, const TrainConfig& c, int size) {
  ValStats st;
  std::size_t inter = 0;
  std::size_t uni = 0;
  const double logit_threshold = std::log(c.iou_threshold / (1.0 - c.iou_threshold));
  Tensor<float> x(1, 1, size, size);
  Tensor<float> t(1, 1, size, size);
  for (const Prepared& p : val) {
    std::copy(p.image.begin(), p.image.end(), x.data.begin());
    std::copy(p.mask.begin(), p.mask.end(), t.data.begin());
    const Tensor<float>& z = model.forward(x, false);
    st.loss += loss_and_grad(z, t, c.loss, static_cast<Tensor<float>*>(nullptr));
    for (std::size_t k = 0; k < z.size(); ++k) {
      const bool pred = z.data[k] > logit_threshold;
      const bool gt = t.data[k] > 0.5f;
      inter += pred && gt;
      uni += pred || gt;
    }
  }
  st.loss /= static_cast<double>(val.size());
  st.iou = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
  return st;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) fail(ErrorCategory::kConfig, "batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorCategory::kConfig, "learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) {
    fail(ErrorCategory::kConfig, "Adam betas must lie in [0, 1)");
  }
  if (max_epochs < 0) fail(ErrorCategory::kConfig, "max_epochs must be >= 0");
  if (max_translation < 0) fail(ErrorCategory::kConfig, "max_translation must be >= 0");
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) fail(ErrorCategory::kConfig, "iou_threshold must lie in (0, 1)");
  if (first_epoch < 1) fail(ErrorCategory::kConfig, "first_epoch must be >= 1");
}

TrainResult train(const NetworkParams& net, std::span<const sim::Sample> train_set,
                  std::span<const sim::Sample> val_set, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  net.config.validate();
  if (train_set.empty()) fail(ErrorCategory::kPrecondition, "training set is empty");
  if (val_set.empty()) fail(ErrorCategory::kPrecondition, "validation set is empty");
  const int size = net.config.input_size;
  const auto train_data = prepare(train_set, size);
  const auto val_data = prepare(val_set, size);
  require(config.max_translation < size, "max_translation must be smaller than the tile");

  UNet<float> model(net);
  Adam adam;
  TrainResult result;
  result.params = net;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const auto bs = static_cast<std::size_t>(config.batch_size);
  std::vector<std::size_t> order(train_data.size());
  std::vector<float> aug(static_cast<std::size_t>(size) * static_cast<std::size_t>(size));

  for (int e = 0; e < config.max_epochs; ++e) {
    const int epoch = config.first_epoch + e;
    std::mt19937_64 rng(sim::derive_seed(config.seed, static_cast<std::uint64_t>(epoch)));
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    double train_loss = 0.0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const auto nb = static_cast<int>(std::min(bs, order.size() - start));
      Tensor<float> x(nb, 1, size, size);
      Tensor<float> t(nb, 1, size, size);
      for (int b = 0; b < nb; ++b) {
        const Prepared& p = train_data[order[start + static_cast<std::size_t>(b)]];
        const AugmentParams a = draw_augmentation(rng, config.augmentation, config.max_translation);
        const auto plane = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
        apply_augmentation(p.image, size, a, {x.sample(b), plane});
        apply_augmentation(p.mask, size, a, {t.sample(b), plane});
      }
      const Tensor<float>& z = model.forward(x, true);
      Tensor<float> dz;
      const double loss = loss_and_grad(z, t, config.loss, &dz);
      if (!std::isfinite(loss)) {
        fail(ErrorCategory::kNumeric, "non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                          std::to_string(batches) + "; try a lower learning rate");
      }
      model.store().zero_grad();
      model.backward(dz);
      adam.update(model.store(), config);
      train_loss += loss;
      ++batches;
    }
    train_loss /= batches;

    const ValStats vs = validate(model, val_data, config, size);
    if (!std::isfinite(vs.loss)) {
      fail(ErrorCategory::kNumeric, "non-finite validation loss at epoch " + std::to_string(epoch));
    }
    TrainRecord rec;
    rec.epoch = epoch;
    rec.train_loss = train_loss;
    rec.val_loss = vs.loss;
    rec.val_iou = vs.iou;
    rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records.push_back(rec);

    NetworkParams current = model.export_params();
    if (vs.loss < best) {
      best = vs.loss;
      since_best = 0;
      result.params = current;
      result.best_epoch = epoch;
    } else {
      ++since_best;
    }
    if (on_epoch) on_epoch(rec, current);
    result.last = std::move(current);
    if (config.patience > 0 && since_best >= config.patience) break;
    if (config.time_budget_s > 0.0 && rec.wall_clock_s >= config.time_budget_s) break;
  }
  if (result.records.empty()) result.last = net;
  return result;
}

TrainResult train(const NetworkParams& net, const sim::DatasetManifest& manifest, const std::filesystem::path& root,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  if (manifest.entries.empty()) fail(ErrorCategory::kPrecondition, "dataset manifest is empty");
  std::vector<sim::Sample> tr, va;
  for (const auto& e : manifest.entries) {
    if (e.split == sim::Split::kTrain) tr.push_back(sim::load_sample(e, root));
    if (e.split == sim::Split::kValidation) va.push_back(sim::load_sample(e, root));
  }
  if (tr.empty() || va.empty()) {
    fail(ErrorCategory::kPrecondition, "manifest needs at least one train and one validation entry");
  }
  return train(net, tr, va, config, on_epoch);
}

std::string format_train_record(const TrainRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d %.8g %.8g %.6f %.3f", r.epoch, r.train_loss, r.val_loss, r.val_iou,
                r.wall_clock_s);
  return buf;
}

TrainRecord parse_train_record(const std::string& line) {
  std::istringstream in(line);
  TrainRecord r;
  if (!(in >> r.epoch >> r.train_loss >> r.val_loss >> r.val_iou >> r.wall_clock_s)) {
    fail(ErrorCategory::kFormat, "malformed training log line '" + line + "'");
  }
  return r;
}

void append_train_log(const std::filesystem::path& path, const TrainRecord& r) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorCategory::kIo, "cannot append to training log " + path.string());
  if (fresh) out << "# epoch train_loss val_loss val_iou wall_clock_s\n";
  out << format_train_record(r) << '\n';
}

std::vector<TrainRecord> read_train_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open training log " + path.string());
  std::vector<TrainRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out.push_back(parse_train_record(line));
  }
  return out;
}

}  // namespace trailkit::segnet
