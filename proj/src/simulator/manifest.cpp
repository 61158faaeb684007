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

/// Manifest layout (plain text, whitespace separated, '#' starts a comment):
///
///   seed <u64>
///   entry <split> <image> <mask> <entry_seed> <background> <bin> <n_trails>
///         { <x0> <y0> <x1> <y1> <fwhm> <peak> <target_snr> <realized_snr> } * n_trails
///
/// Each entry is a single line. Paths are relative to the manifest's
/// directory. Trail coordinates and fwhm are in tile pixels; peak is in
/// electrons at native resolution and SNRs are measured at native resolution.

#include <cstdio>
#include <fstream>
#include <sstream>

#include "trailkit/error.hpp"
#include "trailkit/simulator.hpp"

namespace trailkit::sim {
namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write manifest " + path.string());
  out << "# trailkit dataset manifest v1\n";
  out << "# entry split image mask entry_seed background bin n_trails "
         "{x0 y0 x1 y1 fwhm peak target_snr realized_snr}...\n";
  out << "seed " << manifest.seed << "\n";
  for (const auto& e : manifest.entries) {
    out << "entry " << to_string(e.split) << ' ' << e.image_path << ' ' << e.mask_path << ' ' << e.seed << ' '
        << e.background_index << ' ' << e.bin << ' ' << e.trails.size();
    for (const auto& t : e.trails) {
      const TrailSpec& s = t.spec;
      for (double v : {s.p0.x, s.p0.y, s.p1.x, s.p1.y, s.fwhm, s.peak_amplitude, s.target_snr, t.realized_snr}) {
        out << ' ' << fmt_double(v);
      }
    }
    out << '\n';
  }
  if (!out) fail(ErrorCategory::kIo, "failed writing manifest " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open manifest " + path.string());
  DatasetManifest m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (kind == "seed") {
      if (!(ls >> m.seed)) fail(ErrorCategory::kFormat, "bad seed line at " + where);
    } else if (kind == "entry") {
      DatasetEntry e;
      std::string split;
      std::size_t n = 0;
      if (!(ls >> split >> e.image_path >> e.mask_path >> e.seed >> e.background_index >> e.bin >> n)) {
        fail(ErrorCategory::kFormat, "bad entry at " + where);
      }
      e.split = parse_split(split);
      for (std::size_t k = 0; k < n; ++k) {
        TrailRecord t;
        TrailSpec& s = t.spec;
        if (!(ls >> s.p0.x >> s.p0.y >> s.p1.x >> s.p1.y >> s.fwhm >> s.peak_amplitude >> s.target_snr >>
              t.realized_snr)) {
          fail(ErrorCategory::kFormat, "truncated trail record at " + where);
        }
        e.trails.push_back(t);
      }
      m.entries.push_back(std::move(e));
    } else {
      fail(ErrorCategory::kFormat, "unknown record '" + kind + "' at " + where);
    }
  }
  return m;
}

void write_dataset(GeneratedDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05zu.trsc", i);
    DatasetEntry& e = dataset.manifest.entries[i];
    e.image_path = std::string("images/") + name;
    e.mask_path = std::string("masks/") + name;
    save_raster(dataset.samples[i].image, dir / e.image_path, RasterFormat::kFlatBinary);
    save_mask(dataset.samples[i].mask, dir / e.mask_path);
  }
  write_manifest(dataset.manifest, dir / "manifest.txt");
}

Sample load_sample(const DatasetEntry& entry, const std::filesystem::path& root) {
  Sample s{load_raster(root / entry.image_path, format_from_extension(entry.image_path)),
           load_mask(root / entry.mask_path)};
  if (s.mask.width() != s.image.width() || s.mask.height() != s.image.height()) {
    fail(ErrorCategory::kFormat, "mask dimensions do not match image for " + entry.image_path);
  }
  return s;
}

}  // namespace trailkit::sim
