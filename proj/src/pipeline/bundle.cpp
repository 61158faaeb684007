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

#include <cstdio>
#include <fstream>
#include <sstream>

#include "trailkit/error.hpp"
#include "trailkit/pipeline.hpp"

namespace trailkit::pipeline {

void write_bundle(const FrameDetection& detection, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create " + dir.string() + ": " + ec.message());
  const std::string& id = detection.frame_id;

  save_mask(detection.mask, dir / (id + "_mask.trsc"));

  std::ofstream trails(dir / (id + "_trails.txt"), std::ios::trunc);
  std::vector<linedet::LineSegment> extended, segments;
  double hw = 0.0;
  for (const auto& t : detection.merged_trails) {
    extended.push_back(linedet::make_segment(t.extended_p0, t.extended_p1, t.segment.width, t.segment.nfa_log10));
    segments.push_back(t.segment);
    hw = t.mask_halfwidth;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "# halfwidth %.10g\n", hw);
  trails << buf;
  linedet::write_segments(trails, extended);
  if (!trails) fail(ErrorCategory::kIo, "failed writing trail list in " + dir.string());
  linedet::write_segments(dir / (id + "_segments.txt"), segments);

  write_tile_results(detection, dir / (id + "_tiles.txt"));

  std::ofstream timing(dir / (id + "_timing.txt"), std::ios::trunc);
  for (const auto& [stage, s] : detection.timing) {
    std::snprintf(buf, sizeof(buf), "%.6f", s);
    timing << stage << ' ' << buf << '\n';
  }
  if (!timing) fail(ErrorCategory::kIo, "failed writing timing report in " + dir.string());
}

std::vector<linedet::TrailLine> read_trails(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open trail list " + path.string());
  std::string first;
  double hw = linedet::default_mask_halfwidth(std::nullopt);
  if (std::getline(in, first)) {
    std::istringstream ls(first);
    std::string hash, key;
    if (ls >> hash >> key && hash == "#" && key == "halfwidth") {
      if (!(ls >> hw)) fail(ErrorCategory::kFormat, "malformed halfwidth line in " + path.string());
    } else {
      in.seekg(0);
    }
  }
  std::vector<linedet::TrailLine> out;
  for (const auto& s : linedet::read_segments(in)) {
    linedet::TrailLine t;
    t.segment = s;
    t.extended_p0 = s.p0;
    t.extended_p1 = s.p1;
    t.mask_halfwidth = hw;
    out.push_back(t);
  }
  return out;
}

void write_tile_results(const FrameDetection& detection, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  out << "frame " << detection.width << ' ' << detection.height << ' ' << detection.tile_size << '\n';
  for (const TileResult& t : detection.tile_results) {
    out << "tile " << t.box.x0 << ' ' << t.box.y0 << ' ' << t.box.x1 << ' ' << t.box.y1 << ' ' << t.segments.size()
        << '\n';
    linedet::write_segments(out, t.segments);
  }
  if (!out) fail(ErrorCategory::kIo, "failed writing " + path.string());
}

FrameDetection read_tile_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open tile results " + path.string());
  FrameDetection det;
  det.frame_id = path.stem().string();
  const std::string suffix = "_tiles";
  if (det.frame_id.ends_with(suffix)) det.frame_id.resize(det.frame_id.size() - suffix.size());
  std::string line, key;
  if (!std::getline(in, line) || !(std::istringstream(line) >> key >> det.width >> det.height >> det.tile_size) ||
      key != "frame") {
    fail(ErrorCategory::kFormat, "tile results must start with a frame line: " + path.string());
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    TileResult t;
    std::size_t n = 0;
    if (!(ls >> key >> t.box.x0 >> t.box.y0 >> t.box.x1 >> t.box.y1 >> n) || key != "tile") {
      fail(ErrorCategory::kFormat, "malformed tile line in " + path.string());
    }
    std::string block;
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::getline(in, line)) fail(ErrorCategory::kFormat, "truncated tile results in " + path.string());
      block += line + '\n';
    }
    std::istringstream bs(block);
    t.segments = linedet::read_segments(bs);
    if (t.segments.size() != n) fail(ErrorCategory::kFormat, "segment count mismatch in " + path.string());
    det.tile_results.push_back(std::move(t));
  }
  return det;
}

}  // namespace trailkit::pipeline
