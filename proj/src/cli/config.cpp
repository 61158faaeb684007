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

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "trailkit/cli.hpp"
#include "trailkit/error.hpp"

namespace trailkit::cli {
namespace {

using nlohmann::json;

// One table of (section, key) <-> field bindings serves both directions.
class Binder {
 public:
  Binder(json& doc, bool writing) : doc_(doc), writing_(writing) {}

  template <typename T>
  void field(const char* section, const char* key, T& value) {
    json& slot = section ? doc_[section] : doc_;
    if (writing_) {
      slot[key] = value;
      return;
    }
    try {
      value = slot.at(key).template get<T>();
    } catch (const json::exception& e) {
      fail(ErrorCategory::kConfig, std::string("bad value for ") + (section ? std::string(section) + "." : "") + key +
                                       ": " + e.what());
    }
  }

  void degrees(const char* section, const char* key, double& radians) {
    double deg = radians / linedet::kDegree;
    field(section, key, deg);
    if (!writing_) radians = deg * linedet::kDegree;
  }

  void loss(const char* section, const char* key, segnet::LossKind& kind) {
    std::string s = segnet::to_string(kind);
    field(section, key, s);
    if (!writing_) kind = segnet::parse_loss(s);
  }

  void augmentation(const char* section, const char* key, unsigned& flags) {
    static const std::pair<const char*, unsigned> kNames[] = {
        {"rotation", segnet::kAugRotation}, {"flip", segnet::kAugFlip}, {"translation", segnet::kAugTranslation}};
    std::vector<std::string> names;
    for (const auto& [n, f] : kNames) {
      if (flags & f) names.push_back(n);
    }
    field(section, key, names);
    if (writing_) return;
    flags = segnet::kAugNone;
    for (const std::string& n : names) {
      bool known = false;
      for (const auto& [name, f] : kNames) {
        if (n == name) {
          flags |= f;
          known = true;
        }
      }
      if (!known) fail(ErrorCategory::kConfig, "unknown augmentation '" + n + "'");
    }
  }

 private:
  json& doc_;
  bool writing_;
};

void bind(RunConfig& c, Binder& b) {
  b.field(nullptr, "seed", c.seed);
  b.field(nullptr, "output_dir", c.output_dir);
  b.field(nullptr, "jobs", c.jobs);

  const char* s = "simulator";
  b.field(s, "count", c.dataset.count);
  b.field(s, "snr_min", c.dataset.snr_low);
  b.field(s, "snr_max", c.dataset.snr_high);
  b.field(s, "snr_weights", c.dataset.snr_weights);
  b.field(s, "split_ratio", c.dataset.split_ratio);
  b.field(s, "tile_size", c.dataset.tile_size);
  b.field(s, "bins", c.dataset.bins);
  b.field(s, "backgrounds", c.backgrounds);
  b.field(s, "background_size", c.background_size);
  b.field(s, "psf_fwhm_x", c.field.psf.fwhm_x);
  b.field(s, "psf_fwhm_y", c.field.psf.fwhm_y);
  b.degrees(s, "psf_theta_deg", c.field.psf.theta);
  b.field(s, "stars_per_megapixel", c.field.stars_per_megapixel);
  b.field(s, "min_star_flux", c.field.min_star_flux);
  b.field(s, "max_star_flux", c.field.max_star_flux);
  b.field(s, "sky_electrons_per_px", c.field.noise.sky_electrons_per_px);
  b.field(s, "exposure_s", c.field.noise.exposure_s);
  b.field(s, "dark_current", c.field.noise.dark_current);
  b.field(s, "readout_noise", c.field.noise.readout_noise);
  b.field(s, "gain", c.field.noise.gain);
  b.field(s, "quant_var", c.field.noise.quant_var);
  b.field(s, "frame_width", c.frames.width);
  b.field(s, "frame_height", c.frames.height);
  b.field(s, "frame_min_trails", c.frames.min_trails);
  b.field(s, "frame_max_trails", c.frames.max_trails);

  s = "segnet";
  b.field(s, "depth", c.net.depth);
  b.field(s, "base_channels", c.net.base_channels);
  b.field(s, "input_size", c.net.input_size);
  b.field(s, "param_seed", c.net.param_seed);
  b.field(s, "batch_size", c.train.batch_size);
  b.field(s, "learning_rate", c.train.learning_rate);
  b.field(s, "beta1", c.train.beta1);
  b.field(s, "beta2", c.train.beta2);
  b.field(s, "adam_eps", c.train.adam_eps);
  b.field(s, "max_epochs", c.train.max_epochs);
  b.field(s, "patience", c.train.patience);
  b.loss(s, "loss", c.train.loss);
  b.augmentation(s, "augmentation", c.train.augmentation);
  b.field(s, "max_translation", c.train.max_translation);
  b.field(s, "iou_threshold", c.train.iou_threshold);
  b.field(s, "time_budget_s", c.train.time_budget_s);

  s = "linedet";
  b.field(s, "grad_threshold", c.detect.lsd.grad_threshold);
  b.degrees(s, "angle_tolerance_deg", c.detect.lsd.angle_tolerance);
  b.field(s, "nfa_epsilon", c.detect.lsd.nfa_epsilon);
  b.field(s, "min_length_ratio", c.detect.lsd.min_length_ratio);
  b.field(s, "scale", c.detect.lsd.scale);
  b.field(s, "sigma_scale", c.detect.lsd.sigma_scale);
  b.field(s, "density_threshold", c.detect.lsd.density_threshold);
  b.field(s, "quant", c.detect.lsd.quant);
  b.field(s, "n_bins", c.detect.lsd.n_bins);
  b.field(s, "border_padding", c.detect.lsd.border_padding);
  b.field(s, "soft_input", c.detect.soft_input);
  b.field(s, "binarize_threshold", c.detect.binarize_threshold);
  b.degrees(s, "merge_max_angle_deg", c.detect.merge.max_angle);
  b.field(s, "merge_max_offset", c.detect.merge.max_offset);
  b.degrees(s, "ridge_max_angle_deg", c.detect.merge.ridge_max_angle);
  b.field(s, "ridge_max_separation", c.detect.merge.ridge_max_separation);
  b.field(s, "ridge_min_overlap", c.detect.merge.ridge_min_overlap);
  b.field(s, "mask_halfwidth", c.detect.mask_halfwidth);

  s = "pipeline";
  b.field(s, "rows", c.grid_rows);
  b.field(s, "cols", c.grid_cols);
  b.field(s, "overlap", c.grid_overlap);
  b.field(s, "batch_size", c.detect.batch_size);

  s = "evalkit";
  b.degrees(s, "max_angle_deg", c.criteria.max_angle_diff);
  b.field(s, "max_perp_distance", c.criteria.max_perp_distance);
  b.field(s, "min_overlap_fraction", c.criteria.min_overlap_fraction);
  b.field(s, "snr_values", c.snr_values);
  b.field(s, "trials_per_snr", c.trials_per_snr);
  b.field(s, "ratios", c.ratios);
}

json to_json(const RunConfig& cfg) {
  json doc = json::object();
  RunConfig copy = cfg;
  Binder b(doc, true);
  bind(copy, b);
  return doc;
}

// Every key of `user` must exist in `reference` with the same nesting.
void check_keys(const json& user, const json& reference, const std::string& prefix) {
  if (!user.is_object()) fail(ErrorCategory::kConfig, "config " + (prefix.empty() ? "root" : prefix) + " must be an object");
  for (const auto& [k, v] : user.items()) {
    const std::string path = prefix.empty() ? k : prefix + "." + k;
    if (!reference.contains(k)) fail(ErrorCategory::kConfig, "unknown config key '" + path + "'");
    if (reference.at(k).is_object()) check_keys(v, reference.at(k), path);
  }
}

void apply_override(json& doc, const json& reference, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorCategory::kConfig, "override '" + text + "' is not key=value");
  const std::string key = text.substr(0, eq);
  const std::string raw = text.substr(eq + 1);
  json::json_pointer ptr;
  std::stringstream ks(key);
  std::string part;
  const json* ref = &reference;
  while (std::getline(ks, part, '.')) {
    if (!ref->is_object() || !ref->contains(part)) fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
    ref = &ref->at(part);
    ptr /= part;
  }
  if (ref->is_object()) fail(ErrorCategory::kConfig, "override '" + key + "' names a section, not a value");
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  doc[ptr] = value;
}

}  // namespace

void RunConfig::validate() const {
  require(jobs >= 0, "jobs must be >= 0");
  require(backgrounds >= 2, "at least two backgrounds are required");
  require(background_size >= dataset.tile_size, "background_size must be at least one tile");
  require(dataset.tile_size == net.input_size, "simulator.tile_size must equal segnet.input_size");
  require(trials_per_snr >= 1, "trials_per_snr must be >= 1");
  field.noise.validate();
  net.validate();
  train.validate();
  detect.validate();
  criteria.validate();
}

std::string config_to_json(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

RunConfig load_config(const std::optional<std::filesystem::path>& file, const std::vector<std::string>& overrides) {
  const json reference = to_json(RunConfig{});
  json doc = reference;
  if (file) {
    std::ifstream in(*file);
    if (!in) fail(ErrorCategory::kIo, "cannot open config " + file->string());
    json user = json::parse(in, nullptr, false, true);
    if (user.is_discarded()) fail(ErrorCategory::kConfig, "config " + file->string() + " is not valid JSON");
    check_keys(user, reference, "");
    doc.merge_patch(user);
  }
  for (const std::string& o : overrides) apply_override(doc, reference, o);
  RunConfig cfg;
  Binder b(doc, false);
  bind(cfg, b);
  cfg.dataset.seed = cfg.seed;
  cfg.dataset.noise = cfg.field.noise;
  cfg.frames.field = cfg.field;
  cfg.frames.snr_low = cfg.dataset.snr_low;
  cfg.frames.snr_high = cfg.dataset.snr_high;
  cfg.frames.snr_weights = cfg.dataset.snr_weights;
  cfg.train.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

}  // namespace trailkit::cli
