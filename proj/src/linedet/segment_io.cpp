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
#include "trailkit/linedet.hpp"

namespace trailkit::linedet {

void write_segments(std::ostream& out, std::span<const LineSegment> segments) {
  char buf[192];
  for (const auto& s : segments) {
    std::snprintf(buf, sizeof(buf), "%.10g %.10g %.10g %.10g %.6g %.6g\n", s.p0.x, s.p0.y, s.p1.x, s.p1.y, s.width,
                  s.nfa_log10);
    out << buf;
  }
}

void write_segments(const std::filesystem::path& path, std::span<const LineSegment> segments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write segment list " + path.string());
  write_segments(out, segments);
  if (!out) fail(ErrorCategory::kIo, "failed writing segment list " + path.string());
}

std::vector<LineSegment> read_segments(std::istream& in) {
  std::vector<LineSegment> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x0, y0, x1, y1, w, nfa;
    if (!(ls >> x0 >> y0 >> x1 >> y1 >> w >> nfa)) {
      fail(ErrorCategory::kFormat, "malformed segment at line " + std::to_string(lineno));
    }
    out.push_back(make_segment({x0, y0}, {x1, y1}, w, nfa));
  }
  return out;
}

std::vector<LineSegment> read_segments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCategory::kIo, "cannot open segment list " + path.string());
  return read_segments(in);
}

}  // namespace trailkit::linedet
