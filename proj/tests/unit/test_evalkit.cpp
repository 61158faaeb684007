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
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "trailkit/error.hpp"
#include "trailkit/evalkit.hpp"

using namespace trailkit;
using namespace trailkit::eval;

namespace {

constexpr double kDeg = linedet::kDegree;

linedet::TrailLine as_line(Point2 a, Point2 b, double hw = 5.0) {
  linedet::TrailLine t;
  t.segment = linedet::make_segment(a, b);
  t.extended_p0 = a;
  t.extended_p1 = b;
  t.mask_halfwidth = hw;
  return t;
}

sim::TrailSpec as_truth(Point2 a, Point2 b) {
  sim::TrailSpec s;
  s.p0 = a;
  s.p1 = b;
  return s;
}

// Admissibility by dense sampling of the truth segment.
bool oracle_admissible(const linedet::TrailLine& d, const sim::TrailSpec& t, const MatchCriteria& c) {
  const Point2 a = d.extended_p0, b = d.extended_p1;
  double ad = std::abs(std::atan2(b.y - a.y, b.x - a.x) - std::atan2(t.p1.y - t.p0.y, t.p1.x - t.p0.x));
  ad = std::fmod(ad, std::numbers::pi);
  ad = std::min(ad, std::numbers::pi - ad);
  const int n = 20001;
  double sum = 0.0;
  int inside = 0;
  for (int k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) / (n - 1);
    const Point2 p = t.p0 + s * (t.p1 - t.p0);
    const double dist = std::abs(cross(b - a, p - a)) / norm(b - a);
    sum += (k == 0 || k == n - 1) ? 0.5 * dist : dist;
    inside += dist <= c.max_perp_distance;
  }
  const double mean = sum / (n - 1);
  const double frac = static_cast<double>(inside) / n;
  return ad <= c.max_angle_diff && mean <= c.max_perp_distance && frac >= c.min_overlap_fraction;
}

// Largest number of admissible one-to-one pairs, by exhaustive search.
int optimal_matches(const std::vector<std::vector<bool>>& ok, std::size_t i, std::vector<bool>& used) {
  if (i == ok.size()) return 0;
  int best = optimal_matches(ok, i + 1, used);
  for (std::size_t j = 0; j < used.size(); ++j) {
    if (!ok[i][j] || used[j]) continue;
    used[j] = true;
    best = std::max(best, 1 + optimal_matches(ok, i + 1, used));
    used[j] = false;
  }
  return best;
}

// Random border-to-border line of a w x h image.
std::pair<Point2, Point2> random_chord(std::mt19937_64& rng, double w, double h, double angle) {
  std::uniform_real_distribution<double> ux(0.3 * w, 0.7 * w), uy(0.3 * h, 0.7 * h);
  const Point2 c{ux(rng), uy(rng)};
  const Point2 d{std::cos(angle), std::sin(angle)};
  const auto t = linedet::extend_to_borders(linedet::make_segment(c, c + d), w, h);
  return {t.extended_p0, t.extended_p1};
}

// Truth lines with pairwise orientation differences above 10 degrees.
std::vector<sim::TrailSpec> spread_truths(std::mt19937_64& rng, int n, double w, double h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double start = u(rng) * std::numbers::pi;
  std::vector<sim::TrailSpec> out;
  for (int k = 0; k < n; ++k) {
    const double ang = start + k * (std::numbers::pi / n) + (u(rng) - 0.5) * 2.0 * kDeg;
    const auto [a, b] = random_chord(rng, w, h, ang);
    out.push_back(as_truth(a, b));
  }
  return out;
}

}  // namespace

TEST_CASE("compute_report reproduces the published table") {
  const double printed[6][2] = {{92.20, 4.74}, {79.57, 74.56}, {76.34, 94.98},
                                {66.80, 99.50}, {49.40, 99.73}, {27.55, 100.0}};
  const auto table = published_threshold_table();
  REQUIRE(table.size() == 6);
  const double ratios[6] = {0.0, 0.12, 0.14, 0.20, 0.39, 0.78};
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(table[i].ratio == ratios[i]);
    CHECK(table[i].tp + table[i].fn == 1488);
    const auto r = compute_report(table[i].tp, table[i].fp, table[i].fn);
    REQUIRE(r.recall.has_value());
    REQUIRE(r.precision.has_value());
    CHECK(std::abs(std::round(10000.0 * *r.recall) / 100.0 - printed[i][0]) < 0.01 + 1e-9);
    CHECK(std::abs(std::round(10000.0 * *r.precision) / 100.0 - printed[i][1]) < 0.01 + 1e-9);
  }
  const auto r = compute_report(1184, 404, 304);
  CHECK(format_percent(r.recall) == "79.57");
  CHECK(format_percent(r.precision) == "74.56");
  const auto r2 = compute_report(994, 5, 494);
  CHECK(format_percent(r2.recall) == "66.80");
  CHECK(format_percent(r2.precision) == "99.50");
}

TEST_CASE("compute_report edge cases") {
  const auto empty = compute_report(0, 0, 0);
  CHECK_FALSE(empty.recall.has_value());
  CHECK_FALSE(empty.precision.has_value());
  CHECK(format_percent(empty.recall) == "-");
  const auto no_det = compute_report(0, 0, 4);
  CHECK(*no_det.recall == 0.0);
  CHECK_FALSE(no_det.precision.has_value());
  const auto exact = compute_report(1, 2, 0);
  CHECK(*exact.precision == 1.0 / 3.0);
  CHECK_THROWS_AS(compute_report(-1, 0, 0), Error);

  const auto t0 = std::chrono::steady_clock::now();
  volatile double sink = 0.0;
  for (const auto& row : published_threshold_table()) sink = sink + *compute_report(row.tp, row.fp, row.fn).recall;
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 1e-3);
}

TEST_CASE("interpolation over the published curve") {
  SweepCurve curve{SweepAxis::kMinLengthRatio, {}};
  for (const auto& row : published_threshold_table()) {
    SweepPoint p;
    p.value = row.ratio;
    p.report = compute_report(row.tp, row.fp, row.fn);
    curve.points.push_back(p);
  }
  CHECK(std::abs(100.0 * interpolate_recall_at_precision(curve, 0.8156) - 78.46) < 0.05);
  CHECK(std::abs(100.0 * interpolate_recall_at_precision(curve, 0.9046) - 77.05) < 0.05);

  // Existing point: exact recall.
  CHECK(interpolate_recall_at_precision(curve, *curve.points[2].report.precision) == *curve.points[2].report.recall);

  // The 0.14 / 0.20 pair lies entirely above 90.46% precision.
  SweepCurve upper{SweepAxis::kMinLengthRatio, {curve.points[2], curve.points[3]}};
  CHECK_THROWS_AS(interpolate_recall_at_precision(upper, 0.9046), Error);
  CHECK_THROWS_AS(interpolate_recall_at_precision(curve, 0.01), Error);

  // Rounded printed percentages give the same figures.
  const double p12 = 0.7456, r12 = 0.7957, p14 = 0.9498, r14 = 0.7634;
  CHECK(std::abs(100.0 * (r12 + (0.8156 - p12) / (p14 - p12) * (r14 - r12)) - 78.46) < 0.05);
  CHECK(std::abs(100.0 * (r12 + (0.9046 - p12) / (p14 - p12) * (r14 - r12)) - 77.05) < 0.05);
}

TEST_CASE("matching examples") {
  const MatchCriteria c;
  std::vector<sim::TrailSpec> truth = {as_truth({0, 20}, {256, 40}), as_truth({0, 200}, {256, 100}),
                                       as_truth({100, 0}, {120, 256})};
  std::vector<linedet::TrailLine> same;
  for (const auto& t : truth) same.push_back(as_line(t.p0, t.p1));
  auto r = match_trails(same, truth, c);
  CHECK(r.tp == 3);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  for (const auto& [i, j] : r.assignment) CHECK(i == j);

  r = match_trails({}, truth, c);
  CHECK(r.tp == 0);
  CHECK(r.fn == 3);
  CHECK(r.fp == 0);

  // Two detections near one truth: one-to-one, the closer wins.
  const std::vector<sim::TrailSpec> one = {as_truth({0, 100}, {256, 100})};
  const std::vector<linedet::TrailLine> two = {as_line({0, 102}, {256, 102}), as_line({0, 101}, {256, 101})};
  r = match_trails(two, one, c);
  CHECK(r.tp == 1);
  CHECK(r.fp == 1);
  CHECK(r.fn == 0);
  REQUIRE(r.assignment.size() == 1);
  CHECK(r.assignment[0].first == 1);
  std::vector<std::vector<bool>> ok = {{oracle_admissible(two[0], one[0], c)}, {oracle_admissible(two[1], one[0], c)}};
  std::vector<bool> used(1, false);
  CHECK(optimal_matches(ok, 0, used) == r.tp);

  // Each criterion on its own rejects.
  CHECK(match_trails(std::vector{as_line({0, 106}, {256, 106})}, one, c).tp == 0);
  CHECK(match_trails(std::vector{as_line({0, 95}, {256, 105})}, one, c).tp == 0);
  CHECK(match_trails(std::vector{as_line({0, 100}, {256, 100})}, std::vector{as_truth({0, 100}, {256, 100})}, c).tp ==
        1);
  const std::vector<sim::TrailSpec> off_band = {as_truth({0, 100}, {256, 100})};
  const auto tilted = as_line({0, 96}, {256, 104.5});
  const auto g = pair_geometry(tilted, off_band[0], c.max_perp_distance);
  CHECK(g.angle_diff < c.max_angle_diff);
  // Crossing at x = 256 * 4 / 8.5: mean of |d| is (4^2 + 4.5^2) / (2 * 8.5), times cos(tilt).
  CHECK(g.mean_distance == doctest::Approx(36.25 / 17.0 * std::cos(std::atan(8.5 / 256.0))).epsilon(1e-12));
  CHECK(g.overlap_fraction == 1.0);
}

TEST_CASE("pair geometry agrees with dense sampling") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 256.0);
  for (int i = 0; i < 300; ++i) {
    const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, p{u(rng), u(rng)}, q{u(rng), u(rng)};
    if (distance(a, b) < 1.0 || distance(p, q) < 1.0) continue;
    const auto d = as_line(a, b);
    const auto t = as_truth(p, q);
    const double hw = 5.0 + 20.0 * u(rng) / 256.0;
    const PairGeometry g = pair_geometry(d, t, hw);
    const int n = 20001;
    double sum = 0.0;
    int inside = 0;
    for (int k = 0; k < n; ++k) {
      const double s = static_cast<double>(k) / (n - 1);
      const Point2 x = p + s * (q - p);
      const double dist = std::abs(cross(b - a, x - a)) / norm(b - a);
      sum += (k == 0 || k == n - 1) ? 0.5 * dist : dist;
      inside += dist <= hw;
    }
    CHECK(g.mean_distance == doctest::Approx(sum / (n - 1)).epsilon(1e-6));
    CHECK(std::abs(g.overlap_fraction - static_cast<double>(inside) / n) < 2e-4);
  }
}

TEST_CASE("greedy matching agrees with the exhaustive optimum on small scenes") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(0, 6);
  const MatchCriteria c;
  int total_tp = 0;
  for (int scene = 0; scene < 400; ++scene) {
    const int nt = count(rng);
    const auto truth = spread_truths(rng, nt, 256, 256);
    std::vector<linedet::TrailLine> det;
    for (const auto& t : truth) {
      if (u(rng) < 0.3) continue;
      const int copies = u(rng) < 0.2 ? 2 : 1;
      for (int k = 0; k < copies; ++k) {
        const double off = (u(rng) - 0.5) * 12.0;
        const double rot = (u(rng) - 0.5) * 5.0 * kDeg;
        const Point2 m = t.midpoint();
        const Point2 dir = (1.0 / t.length()) * (t.p1 - t.p0);
        const Point2 nrm{-dir.y, dir.x};
        const Point2 d2{std::cos(rot) * dir.x - std::sin(rot) * dir.y, std::sin(rot) * dir.x + std::cos(rot) * dir.y};
        const Point2 c0 = m + off * nrm;
        det.push_back(linedet::extend_to_borders(linedet::make_segment(c0, c0 + d2), 256, 256));
      }
    }
    for (int k = 0; k < static_cast<int>(u(rng) * 3); ++k) {
      const auto [a, b] = random_chord(rng, 256, 256, u(rng) * std::numbers::pi);
      det.push_back(as_line(a, b));
    }
    if (det.size() > 6) det.resize(6);

    const MatchResult r = match_trails(det, truth, c);
    CHECK(r.tp + r.fn == static_cast<int>(truth.size()));
    CHECK(r.tp + r.fp == static_cast<int>(det.size()));
    std::vector<std::vector<bool>> ok(det.size(), std::vector<bool>(truth.size()));
    for (std::size_t i = 0; i < det.size(); ++i) {
      for (std::size_t j = 0; j < truth.size(); ++j) ok[i][j] = oracle_admissible(det[i], truth[j], c);
    }
    std::vector<bool> used(truth.size(), false);
    CHECK(r.tp == optimal_matches(ok, 0, used));
    std::vector<bool> seen_d(det.size(), false), seen_t(truth.size(), false);
    for (const auto& [i, j] : r.assignment) {
      CHECK(ok[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      CHECK_FALSE(seen_d[static_cast<std::size_t>(i)]);
      CHECK_FALSE(seen_t[static_cast<std::size_t>(j)]);
      seen_d[static_cast<std::size_t>(i)] = seen_t[static_cast<std::size_t>(j)] = true;
    }
    total_tp += r.tp;
  }
  CHECK(total_tp > 200);
}

TEST_CASE("swapping detections and truth swaps fp and fn") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MatchCriteria c;
  for (int scene = 0; scene < 200; ++scene) {
    const auto truth = spread_truths(rng, 1 + static_cast<int>(u(rng) * 4), 256, 256);
    std::vector<linedet::TrailLine> det;
    for (const auto& t : truth) {
      if (u(rng) < 0.25) continue;
      const double mag = u(rng) < 0.5 ? 3.0 * u(rng) : 7.0 + 3.0 * u(rng);
      const double off = u(rng) < 0.5 ? -mag : mag;
      const Point2 dir = (1.0 / t.length()) * (t.p1 - t.p0);
      const Point2 shift = off * Point2{-dir.y, dir.x};
      det.push_back(as_line(t.p0 + shift, t.p1 + shift));
    }
    std::vector<linedet::TrailLine> truth_as_det;
    std::vector<sim::TrailSpec> det_as_truth;
    for (const auto& t : truth) truth_as_det.push_back(as_line(t.p0, t.p1));
    for (const auto& d : det) det_as_truth.push_back(as_truth(d.extended_p0, d.extended_p1));
    const auto fwd = match_trails(det, truth, c);
    const auto rev = match_trails(truth_as_det, det_as_truth, c);
    CHECK(fwd.tp == rev.tp);
    CHECK(fwd.fp == rev.fn);
    CHECK(fwd.fn == rev.fp);
  }
}

TEST_CASE("threshold sweep is monotone on random detections") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<double> ratios = {0.0, 0.12, 0.14, 0.20, 0.39, 0.78};
  const MatchCriteria c;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n_images = 1 + static_cast<std::size_t>(u(rng) * 8);
    std::vector<std::vector<sim::TrailSpec>> truth;
    std::vector<std::vector<linedet::LineSegment>> raw;
    for (std::size_t i = 0; i < n_images; ++i) {
      truth.push_back(spread_truths(rng, static_cast<int>(u(rng) * 4), 256, 256));
      std::vector<linedet::LineSegment> segs;
      for (const auto& t : truth.back()) {
        const int pieces = static_cast<int>(u(rng) * 3);
        for (int k = 0; k < pieces; ++k) {
          const double s0 = u(rng), s1 = u(rng);
          const Point2 a = t.p0 + s0 * (t.p1 - t.p0), b = t.p0 + s1 * (t.p1 - t.p0);
          if (distance(a, b) > 0.5) segs.push_back(linedet::make_segment(a, b + Point2{0.0, u(rng)}));
        }
      }
      const int noise = static_cast<int>(u(rng) * 12);
      for (int k = 0; k < noise; ++k) {
        const Point2 a{256 * u(rng), 256 * u(rng)};
        const double len = 256.0 * u(rng) * u(rng);
        const double ang = u(rng) * std::numbers::pi;
        segs.push_back(linedet::make_segment(a, a + len * Point2{std::cos(ang), std::sin(ang)}));
      }
      raw.push_back(segs);
    }
    const auto curve = threshold_sweep(raw, truth, ratios, c, 256, 256);
    REQUIRE(curve.points.size() == ratios.size());
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
      const auto& prev = curve.points[k - 1].report;
      const auto& cur = curve.points[k].report;
      CHECK(curve.points[k].value > curve.points[k - 1].value);
      CHECK(cur.fp <= prev.fp);
      CHECK(cur.tp <= prev.tp);
      CHECK(cur.tp + cur.fn == prev.tp + prev.fn);
      if (prev.recall && cur.recall) CHECK(*cur.recall <= *prev.recall);
    }
  }
}

TEST_CASE("threshold sweep at ratio 0 equals unfiltered matching") {
  std::mt19937_64 rng(4);
  const auto truth = spread_truths(rng, 3, 300, 200);
  std::vector<linedet::LineSegment> raw = {linedet::make_segment(truth[0].p0, truth[0].midpoint()),
                                           linedet::make_segment({10, 10}, {13, 12})};
  const std::vector<std::vector<sim::TrailSpec>> t = {truth};
  const std::vector<std::vector<linedet::LineSegment>> d = {raw};
  const std::vector<double> zero = {0.0};
  const auto curve = threshold_sweep(d, t, zero, MatchCriteria{}, 300, 200);
  std::vector<linedet::TrailLine> ext;
  for (const auto& s : raw) ext.push_back(linedet::extend_to_borders(s, 300, 200));
  const auto direct = match_trails(ext, truth, MatchCriteria{});
  CHECK(curve.points[0].report.tp == direct.tp);
  CHECK(curve.points[0].report.fp == direct.fp);
  CHECK(curve.points[0].report.fn == direct.fn);
  CHECK(direct.tp == 1);

  const std::vector<double> unsorted = {0.2, 0.1};
  CHECK_THROWS_AS(threshold_sweep(d, t, unsorted, MatchCriteria{}, 300, 200), Error);
}

TEST_CASE("ratios straddling a length band change counts by that band") {
  // Side 256: ratios 0.14 and 0.20 keep lengths >= 35.84 and >= 51.2.
  const std::vector<sim::TrailSpec> truth = {as_truth({0, 30}, {256, 30}), as_truth({0, 128}, {256, 128}),
                                             as_truth({30, 0}, {30, 256}), as_truth({200, 0}, {200, 256})};
  const std::vector<linedet::LineSegment> raw = {
      linedet::make_segment({20, 30}, {60, 30}),     // 40, true, in band
      linedet::make_segment({30, 100}, {30, 145}),   // 45, true, in band
      linedet::make_segment({10, 128}, {200, 128}),  // 190, true, kept
      linedet::make_segment({100, 60}, {140, 70}),   // 41.2, false, in band
      linedet::make_segment({60, 200}, {180, 230}),  // 123.7, false, kept
      linedet::make_segment({150, 50}, {160, 60}),   // 14.1, false, dropped by both
  };
  const std::vector<std::vector<sim::TrailSpec>> t = {truth};
  const std::vector<std::vector<linedet::LineSegment>> d = {raw};
  const std::vector<double> ratios = {0.14, 0.20};
  const auto curve = threshold_sweep(d, t, ratios, MatchCriteria{}, 256, 256);
  const auto& lo = curve.points[0].report;
  const auto& hi = curve.points[1].report;
  CHECK(lo.tp == 3);
  CHECK(lo.fp == 2);
  CHECK(lo.tp - hi.tp == 2);
  CHECK(lo.fp - hi.fp == 1);
  CHECK(hi.fn - lo.fn == 2);
}

TEST_CASE("criteria scaling and validation") {
  const MatchCriteria c;
  CHECK(c.max_angle_diff == doctest::Approx(2.0 * kDeg));
  CHECK(c.max_perp_distance == 5.0);
  CHECK(c.min_overlap_fraction == 0.3);
  const auto s = c.scaled(8.0);
  CHECK(s.max_perp_distance == 40.0);
  CHECK(s.max_angle_diff == c.max_angle_diff);
  MatchCriteria bad = c;
  bad.min_overlap_fraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.max_perp_distance = 0.0;
  CHECK_THROWS_AS(match_trails({}, {}, bad), Error);
}

TEST_CASE("table and curve output") {
  SweepCurve curve{SweepAxis::kMinLengthRatio, {}};
  for (const auto& row : published_threshold_table()) {
    SweepPoint p;
    p.value = row.ratio;
    p.report = compute_report(row.tp, row.fp, row.fn);
    curve.points.push_back(p);
  }
  std::ostringstream os;
  write_table(os, curve);
  const std::string text = os.str();
  CHECK(text.find("# threshold tp fp fn recall% precision%") == 0);
  CHECK(text.find("0.12 1184 404 304 79.57 74.56") != std::string::npos);
  CHECK(text.find("0.78 410 0 1078 27.55 100.00") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);

  SweepCurve rate{SweepAxis::kSnr, {}};
  SweepPoint p;
  p.value = 4;
  p.trials = 100;
  p.detected = 97;
  rate.points.push_back(p);
  p.value = 5;
  p.trials = 0;
  p.detected = 0;
  rate.points.push_back(p);
  std::ostringstream rs;
  write_rate_curve(rs, rate);
  CHECK(rs.str() == "# snr rate detected trials\n4 0.9700 97 100\n5 0.0000 0 0\n");
}

TEST_CASE("snr sweep contract on a small network") {
  segnet::NetConfig nc;
  nc.depth = 2;
  nc.base_channels = 4;
  nc.input_size = 32;
  const auto net = segnet::build_network(nc);
  SnrSweepOptions o;
  o.tile_size = 32;
  o.batch_size = 2;
  const std::vector<double> snrs = {0.0, 10.0, 30.0};
  const auto a = snr_sweep(net, snrs, 3, 99, o);
  const auto b = snr_sweep(net, snrs, 3, 99, o);
  REQUIRE(a.points.size() == 3);
  CHECK(a.axis == SweepAxis::kSnr);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.points[k].value == snrs[k]);
    CHECK(a.points[k].trials == 3);
    CHECK(a.points[k].detected <= 3);
    CHECK(a.points[k].report.tp + a.points[k].report.fn == 3);
    CHECK(a.points[k].detected == b.points[k].detected);
    CHECK(a.points[k].report.fp == b.points[k].report.fp);
  }
  o.tile_size = 64;
  CHECK_THROWS_AS(snr_sweep(net, snrs, 3, 99, o), Error);
  o.tile_size = 32;
  CHECK_THROWS_AS(snr_sweep(net, snrs, 0, 99, o), Error);
  const std::vector<double> down = {10.0, 5.0};
  CHECK_THROWS_AS(snr_sweep(net, down, 1, 99, o), Error);
}
