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
#include <ostream>

#include "trailkit/error.hpp"
#include "trailkit/evalkit.hpp"

namespace trailkit::eval {
namespace {

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  fn(out);
  if (!out) fail(ErrorCategory::kIo, "failed writing " + path.string());
}

}  // namespace

void write_table(std::ostream& out, const SweepCurve& curve) {
  out << (curve.axis == SweepAxis::kSnr ? "# snr" : "# threshold") << " tp fp fn recall% precision%\n";
  char buf[160];
  for (const SweepPoint& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.4g %ld %ld %ld %s %s\n", p.value, p.report.tp, p.report.fp, p.report.fn,
                  format_percent(p.report.recall).c_str(), format_percent(p.report.precision).c_str());
    out << buf;
  }
}

void write_table(const std::filesystem::path& path, const SweepCurve& curve) {
  write_file(path, [&](std::ostream& out) { write_table(out, curve); });
}

void write_rate_curve(std::ostream& out, const SweepCurve& curve) {
  out << "# snr rate detected trials\n";
  char buf[128];
  for (const SweepPoint& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.6g %.4f %ld %ld\n", p.value, p.rate(), p.detected, p.trials);
    out << buf;
  }
}

void write_rate_curve(const std::filesystem::path& path, const SweepCurve& curve) {
  write_file(path, [&](std::ostream& out) { write_rate_curve(out, curve); });
}

}  // namespace trailkit::eval
