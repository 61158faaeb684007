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

#include <array>
#include <cstdio>

#include "trailkit/error.hpp"
#include "trailkit/evalkit.hpp"

namespace trailkit::eval {
namespace {

constexpr std::array<PublishedRow, 6> kTable = {{
    {0.00, 1372, 27559, 116},
    {0.12, 1184, 404, 304},
    {0.14, 1136, 60, 352},
    {0.20, 994, 5, 494},
    {0.39, 735, 2, 753},
    {0.78, 410, 0, 1078},
}};

}  // namespace

DetectionReport compute_report(long tp, long fp, long fn) {
  require(tp >= 0 && fp >= 0 && fn >= 0, "detection counts must be non-negative");
  DetectionReport r{tp, fp, fn, std::nullopt, std::nullopt};
  if (tp + fn > 0) r.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (tp + fp > 0) r.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  return r;
}

std::string format_percent(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * *v);
  return buf;
}

std::span<const PublishedRow> published_threshold_table() { return kTable; }

double interpolate_recall_at_precision(const SweepCurve& curve, double target) {
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& r = curve.points[i].report;
    if (r.precision && r.recall && *r.precision == target) return *r.recall;
  }
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& a = curve.points[i].report;
    const auto& b = curve.points[i + 1].report;
    if (!a.precision || !b.precision || !a.recall || !b.recall) continue;
    const double pa = *a.precision;
    const double pb = *b.precision;
    if ((pa - target) * (pb - target) > 0.0 || pa == pb) continue;
    const double t = (target - pa) / (pb - pa);
    return *a.recall + t * (*b.recall - *a.recall);
  }
  fail(ErrorCategory::kRange, "target precision is not bracketed by the curve");
}

}  // namespace trailkit::eval
