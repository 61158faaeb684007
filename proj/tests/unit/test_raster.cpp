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

#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "trailkit/error.hpp"
#include "trailkit/raster.hpp"

using namespace trailkit;
using trailkit::testing::TempDir;

namespace {

Raster random_image(std::mt19937_64& rng, bool integer_valued) {
  std::uniform_int_distribution<int> side(1, 40);
  const int w = side(rng), h = side(rng);
  Raster img(w, h);
  std::uniform_int_distribution<int> iv(0, 65535);
  std::uniform_real_distribution<float> fv(0.0f, 1.0e6f);
  for (float& v : img.pixels()) v = integer_valued ? static_cast<float>(iv(rng)) : fv(rng);
  return img;
}

bool bitwise_equal(const Raster& a, const Raster& b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  return std::equal(a.pixels().begin(), a.pixels().end(), b.pixels().begin());
}

}  // namespace

TEST_CASE("zero flat-binary image loads as zeros") {
  TempDir dir;
  save_raster(Raster(256, 256), dir / "z.trsc", RasterFormat::kFlatBinary);
  const Raster r = load_raster(dir / "z.trsc", RasterFormat::kFlatBinary);
  CHECK(r.width() == 256);
  CHECK(r.height() == 256);
  CHECK(r.size() == 65536);
  CHECK(r.sum() == 0.0);
}

TEST_CASE("round trips are exact for every format") {
  TempDir dir;
  std::mt19937_64 rng(11);
  const RasterFormat formats[] = {RasterFormat::kFlatBinary, RasterFormat::kFitsLike, RasterFormat::kPortableGray16};
  for (const RasterFormat f : formats) {
    for (int i = 0; i < 100; ++i) {
      const Raster img = random_image(rng, f == RasterFormat::kPortableGray16);
      save_raster(img, dir / "img", f);
      CHECK(bitwise_equal(load_raster(dir / "img", f), img));
    }
  }
}

TEST_CASE("portable gray 16 range") {
  TempDir dir;
  Raster img(3, 2, 65535.0f);
  save_raster(img, dir / "a.pgm", RasterFormat::kPortableGray16);
  CHECK(bitwise_equal(load_raster(dir / "a.pgm", RasterFormat::kPortableGray16), img));
  img(1, 1) = 70000.0f;
  try {
    save_raster(img, dir / "b.pgm", RasterFormat::kPortableGray16);
    FAIL("expected a range error");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kRange);
  }
}

TEST_CASE("fits metadata round trip") {
  TempDir dir;
  Raster img(5, 4, 2.5f);
  img.meta()["EXPTIME"] = "60";
  img.meta()["PSF_FWHM"] = "3.5";
  save_raster(img, dir / "m.fits", RasterFormat::kFitsLike);
  const Raster r = load_raster(dir / "m.fits", format_from_extension(dir / "m.fits"));
  CHECK(r.meta().at("EXPTIME") == "60");
  CHECK(r.meta().at("PSF_FWHM") == "3.5");
}

TEST_CASE("full frame dimensions survive the flat-binary container") {
  TempDir dir;
  save_raster(Raster(9576, 6388, 1.0f), dir / "f.trsc", RasterFormat::kFlatBinary);
  const Raster r = load_raster(dir / "f.trsc", RasterFormat::kFlatBinary);
  CHECK(r.width() == 9576);
  CHECK(r.height() == 6388);
}

TEST_CASE("corrupt files are rejected") {
  TempDir dir;
  save_raster(Raster(8, 8, 1.0f), dir / "t.trsc", RasterFormat::kFlatBinary);
  std::filesystem::resize_file(dir / "t.trsc", 40);
  CHECK_THROWS_AS(load_raster(dir / "t.trsc", RasterFormat::kFlatBinary), Error);
  CHECK_THROWS_AS(load_raster(dir / "missing.trsc", RasterFormat::kFlatBinary), Error);
  Raster bad(2, 2);
  bad(0, 0) = -1.0f;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("mask round trip") {
  TempDir dir;
  BinaryMask m(17, 9);
  std::mt19937_64 rng(3);
  for (auto& b : m.bits()) b = static_cast<std::uint8_t>(rng() & 1u);
  save_mask(m, dir / "m.trsc");
  CHECK(load_mask(dir / "m.trsc") == m);
}

TEST_CASE("tile grid examples") {
  const TileGrid g = make_tile_grid(9576, 6388, 4, 5, 0.1);
  CHECK(g.boxes.size() == 20);
  const TileGrid one = make_tile_grid(256, 256, 1, 1, 0.0);
  REQUIRE(one.boxes.size() == 1);
  CHECK(one.boxes[0] == TileBox{0, 0, 256, 256});

  const TileGrid small = make_tile_grid(100, 100, 2, 2, 0.2);
  REQUIRE(small.boxes.size() == 4);
  for (const TileBox& b : small.boxes) {
    CHECK(b.width() == 60);
    CHECK(b.height() == 60);
  }
  // Overlap of horizontal and vertical neighbours, by pixel count.
  auto shared = [](const TileBox& a, const TileBox& b) {
    long n = 0;
    for (int y = 0; y < 100; ++y) {
      for (int x = 0; x < 100; ++x) {
        const bool in_a = x >= a.x0 && x < a.x1 && y >= a.y0 && y < a.y1;
        const bool in_b = x >= b.x0 && x < b.x1 && y >= b.y0 && y < b.y1;
        n += in_a && in_b;
      }
    }
    return n;
  };
  CHECK(shared(small.boxes[0], small.boxes[1]) == 20 * 60);
  CHECK(shared(small.boxes[0], small.boxes[2]) == 20 * 60);
}

TEST_CASE("tile grid coverage property") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int w = std::uniform_int_distribution<int>(20, 300)(rng);
    const int h = std::uniform_int_distribution<int>(20, 300)(rng);
    const int rows = std::uniform_int_distribution<int>(1, 5)(rng);
    const int cols = std::uniform_int_distribution<int>(1, 5)(rng);
    const double overlap = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
    const TileGrid g = make_tile_grid(w, h, rows, cols, overlap);
    REQUIRE(static_cast<int>(g.boxes.size()) == rows * cols);
    std::vector<int> hits(static_cast<std::size_t>(w) * h, 0);
    int min_w = w, max_w = 0, min_h = h, max_h = 0;
    for (const TileBox& b : g.boxes) {
      REQUIRE(b.x0 >= 0);
      REQUIRE(b.y0 >= 0);
      REQUIRE(b.x1 <= w);
      REQUIRE(b.y1 <= h);
      min_w = std::min(min_w, b.width());
      max_w = std::max(max_w, b.width());
      min_h = std::min(min_h, b.height());
      max_h = std::max(max_h, b.height());
      for (int y = b.y0; y < b.y1; ++y) {
        for (int x = b.x0; x < b.x1; ++x) ++hits[static_cast<std::size_t>(y) * w + x];
      }
    }
    CHECK(max_w - min_w <= 1);
    CHECK(max_h - min_h <= 1);
    CHECK(*std::min_element(hits.begin(), hits.end()) >= 1);
    CHECK(hits[0] == 1);
    CHECK(hits[static_cast<std::size_t>(w) - 1] == 1);
    CHECK(hits[static_cast<std::size_t>(h - 1) * w] == 1);
    CHECK(hits.back() == 1);
    // Horizontal neighbours share at least overlap x tile width.
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c + 1 < cols; ++c) {
        const TileBox& a = g.boxes[static_cast<std::size_t>(r * cols + c)];
        const TileBox& b = g.boxes[static_cast<std::size_t>(r * cols + c + 1)];
        CHECK(a.x1 - b.x0 >= overlap * a.width() - 1e-9);
      }
    }
  }
}

TEST_CASE("tile grid rejects impossible overlap") {
  CHECK_THROWS_AS(make_tile_grid(100, 100, 2, 2, 0.6), Error);
  CHECK_THROWS_AS(make_tile_grid(100, 100, 0, 2, 0.1), Error);
}

TEST_CASE("resample examples") {
  std::mt19937_64 rng(9);
  Raster img(31, 17);
  for (float& v : img.pixels()) v = std::uniform_real_distribution<float>(0.0f, 100.0f)(rng);
  CHECK(bitwise_equal(resample(img, 31, 17), img));

  const Raster flat = resample(Raster(512, 512, 7.25f), 256, 256);
  CHECK(flat.width() == 256);
  for (float v : flat.pixels()) REQUIRE(v == 7.25f);

  const Raster tiny = resample(Raster(2, 2, std::vector<float>{1, 3, 5, 7}), 1, 1);
  CHECK(tiny(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("resample preserves flux and constants") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = std::uniform_int_distribution<int>(5, 200)(rng);
    const int h = std::uniform_int_distribution<int>(5, 200)(rng);
    const int ow = std::uniform_int_distribution<int>(1, 120)(rng);
    const int oh = std::uniform_int_distribution<int>(1, 120)(rng);
    Raster img(w, h);
    for (float& v : img.pixels()) v = std::uniform_real_distribution<float>(0.0f, 1000.0f)(rng);
    const Raster out = resample(img, ow, oh);
    const double area = static_cast<double>(w) * h / (static_cast<double>(ow) * oh);
    CHECK(out.sum() * area == doctest::Approx(img.sum()).epsilon(1e-3));
    const Raster c = resample(Raster(w, h, 3.0f), ow, oh);
    for (float v : c.pixels()) REQUIRE(v == doctest::Approx(3.0).epsilon(1e-6));
  }
}

TEST_CASE("resample_region equals crop then resample") {
  std::mt19937_64 rng(2);
  Raster img(90, 70);
  for (float& v : img.pixels()) v = std::uniform_real_distribution<float>(0.0f, 50.0f)(rng);
  img.meta()["PSF_FWHM"] = "3";
  const TileBox box{13, 7, 77, 61};
  const Raster a = resample_region(img, box, 32, 32);
  const Raster b = resample(crop(img, box), 32, 32);
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a.pixels()[i] == doctest::Approx(b.pixels()[i]).epsilon(1e-5));
  CHECK(crop(img, box).meta().at("PSF_FWHM") == "3");
}

TEST_CASE("mask iou") {
  BinaryMask a(4, 4), b(4, 4);
  CHECK(mask_iou(a, b) == 1.0);
  a.set(0, 0);
  a.set(1, 0);
  b.set(1, 0);
  CHECK(mask_iou(a, b) == doctest::Approx(0.5));
  CHECK(a.popcount() == 2);
}
