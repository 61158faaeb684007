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

/// Raster file formats.
///
/// flat-binary (.trsc), all integers little-endian:
///
///   offset  size  field
///   0       4     magic "TRSC"
///   4       4     u32 width
///   8       4     u32 height
///   12      4     u32 dtype tag: 1 = f32, 2 = u16, 3 = f64, 4 = u8 mask
///   16      ...   row-major payload, width * height samples
///
/// portable-gray-16 (.pgm): binary PGM "P5", maxval 65535, big-endian u16
/// samples. Pixel values are rounded to the nearest integer on write.
///
/// fits-like (.fits): a single primary HDU with BITPIX=-32. Non-structural
/// header cards round-trip through Raster::meta(); string values are quoted.

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "trailkit/error.hpp"
#include "trailkit/raster.hpp"

namespace trailkit {
namespace {

constexpr std::array<char, 4> kFlatMagic = {'T', 'R', 'S', 'C'};
constexpr std::uint32_t kTagF32 = 1;
constexpr std::uint32_t kTagU16 = 2;
constexpr std::uint32_t kTagF64 = 3;
constexpr std::uint32_t kTagU8 = 4;
constexpr std::size_t kFitsBlock = 2880;
constexpr std::size_t kFitsCard = 80;

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCategory::kIo, "write failed for " + path.string());
}

template <typename T>
void put_le(std::vector<char>& buf, T value) {
  auto raw = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  buf.insert(buf.end(), raw.begin(), raw.end());
}

template <typename T>
void put_be(std::vector<char>& buf, T value) {
  auto raw = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::little) std::reverse(raw.begin(), raw.end());
  buf.insert(buf.end(), raw.begin(), raw.end());
}

template <typename T>
T get_le(const char* p) {
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<T>(raw);
}

template <typename T>
T get_be(const char* p) {
  std::array<char, sizeof(T)> raw;
  std::memcpy(raw.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::little) std::reverse(raw.begin(), raw.end());
  return std::bit_cast<T>(raw);
}

std::size_t checked_area(std::uint64_t w, std::uint64_t h) {
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20)) {
    fail(ErrorCategory::kFormat, "implausible raster dimensions");
  }
  return static_cast<std::size_t>(w * h);
}

// --- flat binary -----------------------------------------------------------

struct FlatPayload {
  std::uint32_t width;
  std::uint32_t height;
  std::uint32_t tag;
  const char* data;
};

FlatPayload parse_flat(const std::vector<char>& bytes) {
  if (bytes.size() < 16 || !std::equal(kFlatMagic.begin(), kFlatMagic.end(), bytes.begin())) {
    fail(ErrorCategory::kFormat, "missing TRSC header");
  }
  FlatPayload p{get_le<std::uint32_t>(&bytes[4]), get_le<std::uint32_t>(&bytes[8]),
                get_le<std::uint32_t>(&bytes[12]), bytes.data() + 16};
  std::size_t sample = 0;
  switch (p.tag) {
    case kTagF32: sample = 4; break;
    case kTagU16: sample = 2; break;
    case kTagF64: sample = 8; break;
    case kTagU8: sample = 1; break;
    default: fail(ErrorCategory::kFormat, "unknown dtype tag " + std::to_string(p.tag));
  }
  const std::size_t n = checked_area(p.width, p.height);
  if (bytes.size() - 16 != n * sample) {
    fail(ErrorCategory::kFormat, "payload size does not match header dimensions");
  }
  return p;
}

Raster load_flat(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const FlatPayload p = parse_flat(bytes);
  const std::size_t n = static_cast<std::size_t>(p.width) * p.height;
  std::vector<float> px(n);
  for (std::size_t i = 0; i < n; ++i) {
    switch (p.tag) {
      case kTagF32: px[i] = get_le<float>(p.data + 4 * i); break;
      case kTagU16: px[i] = get_le<std::uint16_t>(p.data + 2 * i); break;
      case kTagF64: px[i] = static_cast<float>(get_le<double>(p.data + 8 * i)); break;
      case kTagU8: px[i] = static_cast<unsigned char>(p.data[i]); break;
    }
  }
  return Raster(static_cast<int>(p.width), static_cast<int>(p.height), std::move(px));
}

void save_flat(const Raster& img, const std::filesystem::path& path) {
  std::vector<char> buf;
  buf.reserve(16 + 4 * img.size());
  buf.insert(buf.end(), kFlatMagic.begin(), kFlatMagic.end());
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(img.width()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(img.height()));
  put_le<std::uint32_t>(buf, kTagF32);
  for (float v : img.pixels()) put_le<float>(buf, v);
  write_file(path, buf);
}

// --- PGM -------------------------------------------------------------------

std::size_t skip_pnm_space(const std::vector<char>& b, std::size_t pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(b[pos]))) {
      ++pos;
    } else {
      break;
    }
  }
  return pos;
}

std::uint64_t read_pnm_int(const std::vector<char>& b, std::size_t& pos) {
  pos = skip_pnm_space(b, pos);
  if (pos >= b.size() || !std::isdigit(static_cast<unsigned char>(b[pos]))) {
    fail(ErrorCategory::kFormat, "malformed PGM header");
  }
  std::uint64_t v = 0;
  while (pos < b.size() && std::isdigit(static_cast<unsigned char>(b[pos]))) {
    v = v * 10 + static_cast<std::uint64_t>(b[pos] - '0');
    if (v > (1ull << 32)) fail(ErrorCategory::kFormat, "PGM header value overflow");
    ++pos;
  }
  return v;
}

Raster load_pgm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    fail(ErrorCategory::kFormat, "not a binary PGM (P5)");
  }
  std::size_t pos = 2;
  const auto w = read_pnm_int(bytes, pos);
  const auto h = read_pnm_int(bytes, pos);
  const auto maxval = read_pnm_int(bytes, pos);
  if (maxval == 0 || maxval > 65535) fail(ErrorCategory::kFormat, "PGM maxval out of range");
  ++pos;  // single whitespace before the raster
  const std::size_t n = checked_area(w, h);
  const std::size_t sample = maxval > 255 ? 2 : 1;
  if (bytes.size() < pos || bytes.size() - pos != n * sample) {
    fail(ErrorCategory::kFormat, "PGM payload size does not match header dimensions");
  }
  std::vector<float> px(n);
  const char* d = bytes.data() + pos;
  for (std::size_t i = 0; i < n; ++i) {
    px[i] = sample == 2 ? static_cast<float>(get_be<std::uint16_t>(d + 2 * i))
                        : static_cast<float>(static_cast<unsigned char>(d[i]));
  }
  return Raster(static_cast<int>(w), static_cast<int>(h), std::move(px));
}

void save_pgm(const Raster& img, const std::filesystem::path& path) {
  std::vector<char> buf;
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n";
  buf.insert(buf.end(), header.begin(), header.end());
  buf.reserve(buf.size() + 2 * img.size());
  for (float v : img.pixels()) {
    const float r = std::nearbyint(v);
    if (!std::isfinite(v) || r < 0.0f || r > 65535.0f) {
      fail(ErrorCategory::kRange, "pixel value " + std::to_string(v) + " not representable in 16 bits");
    }
    put_be<std::uint16_t>(buf, static_cast<std::uint16_t>(r));
  }
  write_file(path, buf);
}

// --- FITS ------------------------------------------------------------------

std::string fits_card(const std::string& key, const std::string& value) {
  std::string card;
  if (key.size() <= 8) {
    card = key;
    card.resize(8, ' ');
    card += "= ";
    std::string v = value;
    if (v.size() < 20) v.insert(0, 20 - v.size(), ' ');
    card += v;
  } else {
    card = "HIERARCH " + key + " = " + value;
  }
  if (card.size() > kFitsCard) fail(ErrorCategory::kFormat, "FITS card too long for key " + key);
  card.resize(kFitsCard, ' ');
  return card;
}

std::string quote_fits(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += "'";
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

// Parses the value field of a card: quoted strings lose their quotes, other
// values drop any trailing "/ comment".
std::string fits_value(const std::string& raw) {
  std::string v = trim(raw);
  if (!v.empty() && v.front() == '\'') {
    std::string out;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] == '\'') {
        if (i + 1 < v.size() && v[i + 1] == '\'') {
          out += '\'';
          ++i;
        } else {
          break;
        }
      } else {
        out += v[i];
      }
    }
    return trim(out);
  }
  const auto slash = v.find('/');
  if (slash != std::string::npos) v = v.substr(0, slash);
  return trim(v);
}

bool is_structural(const std::string& key) {
  static const char* kKeys[] = {"SIMPLE", "BITPIX", "NAXIS", "NAXIS1", "NAXIS2", "EXTEND",
                                "BZERO",  "BSCALE", "END",   "COMMENT", "HISTORY"};
  return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const char* k) { return key == k; });
}

Raster load_fits(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  Metadata meta;
  long bitpix = 0;
  long naxis = -1;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  double bzero = 0.0;
  double bscale = 1.0;
  std::size_t pos = 0;
  bool ended = false;
  while (pos + kFitsCard <= bytes.size()) {
    const std::string card(bytes.data() + pos, kFitsCard);
    pos += kFitsCard;
    std::string key;
    std::string value;
    if (card.rfind("HIERARCH ", 0) == 0) {
      const auto eq = card.find('=');
      if (eq == std::string::npos) continue;
      key = trim(card.substr(9, eq - 9));
      value = fits_value(card.substr(eq + 1));
    } else {
      key = trim(card.substr(0, 8));
      if (key == "END") {
        ended = true;
        break;
      }
      if (card.size() < 10 || card[8] != '=') continue;
      value = fits_value(card.substr(10));
    }
    if (pos == kFitsCard && key != "SIMPLE") fail(ErrorCategory::kFormat, "FITS file must start with SIMPLE");
    try {
      if (key == "BITPIX") bitpix = std::stol(value);
      else if (key == "NAXIS") naxis = std::stol(value);
      else if (key == "NAXIS1") n1 = std::stoull(value);
      else if (key == "NAXIS2") n2 = std::stoull(value);
      else if (key == "BZERO") bzero = std::stod(value);
      else if (key == "BSCALE") bscale = std::stod(value);
    } catch (const std::exception&) {
      fail(ErrorCategory::kFormat, "bad FITS value for " + key);
    }
    if (!is_structural(key)) meta[key] = value;
  }
  if (!ended) fail(ErrorCategory::kFormat, "FITS header has no END card");
  if (naxis != 2) fail(ErrorCategory::kFormat, "only 2-D FITS images are supported");
  const std::size_t n = checked_area(n1, n2);
  const std::size_t data_start = ((pos + kFitsBlock - 1) / kFitsBlock) * kFitsBlock;
  const std::size_t sample = static_cast<std::size_t>(std::abs(bitpix)) / 8;
  if (sample == 0 || (bitpix != 8 && bitpix != 16 && bitpix != 32 && bitpix != -32 && bitpix != -64)) {
    fail(ErrorCategory::kFormat, "unsupported BITPIX " + std::to_string(bitpix));
  }
  if (bytes.size() < data_start + n * sample) {
    fail(ErrorCategory::kFormat, "FITS payload shorter than NAXIS1 x NAXIS2");
  }
  std::vector<float> px(n);
  const char* d = bytes.data() + data_start;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    switch (bitpix) {
      case 8: v = static_cast<unsigned char>(d[i]); break;
      case 16: v = get_be<std::int16_t>(d + 2 * i); break;
      case 32: v = get_be<std::int32_t>(d + 4 * i); break;
      case -32: v = get_be<float>(d + 4 * i); break;
      case -64: v = get_be<double>(d + 8 * i); break;
    }
    px[i] = static_cast<float>(bzero + bscale * v);
  }
  Raster img(static_cast<int>(n1), static_cast<int>(n2), std::move(px));
  img.meta() = std::move(meta);
  return img;
}

void save_fits(const Raster& img, const std::filesystem::path& path) {
  std::vector<char> buf;
  auto add = [&](const std::string& card) { buf.insert(buf.end(), card.begin(), card.end()); };
  add(fits_card("SIMPLE", "T"));
  add(fits_card("BITPIX", "-32"));
  add(fits_card("NAXIS", "2"));
  add(fits_card("NAXIS1", std::to_string(img.width())));
  add(fits_card("NAXIS2", std::to_string(img.height())));
  for (const auto& [k, v] : img.meta()) {
    if (is_structural(k)) continue;
    add(fits_card(k, quote_fits(v)));
  }
  std::string end = "END";
  end.resize(kFitsCard, ' ');
  add(end);
  buf.resize(((buf.size() + kFitsBlock - 1) / kFitsBlock) * kFitsBlock, ' ');
  for (float v : img.pixels()) put_be<float>(buf, v);
  buf.resize(((buf.size() + kFitsBlock - 1) / kFitsBlock) * kFitsBlock, '\0');
  write_file(path, buf);
}

}  // namespace

RasterFormat parse_raster_format(const std::string& name) {
  if (name == "fits-like" || name == "fits") return RasterFormat::kFitsLike;
  if (name == "portable-gray-16" || name == "pgm") return RasterFormat::kPortableGray16;
  if (name == "flat-binary" || name == "trsc") return RasterFormat::kFlatBinary;
  fail(ErrorCategory::kConfig, "unknown raster format '" + name + "'");
}

RasterFormat format_from_extension(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".fits" || ext == ".fit" || ext == ".fts") return RasterFormat::kFitsLike;
  if (ext == ".pgm") return RasterFormat::kPortableGray16;
  if (ext == ".trsc" || ext == ".bin") return RasterFormat::kFlatBinary;
  fail(ErrorCategory::kConfig, "cannot infer raster format from '" + path.string() + "'");
}

Raster load_raster(const std::filesystem::path& path, RasterFormat format) {
  Raster img;
  switch (format) {
    case RasterFormat::kFitsLike: img = load_fits(path); break;
    case RasterFormat::kPortableGray16: img = load_pgm(path); break;
    case RasterFormat::kFlatBinary: img = load_flat(path); break;
  }
  img.validate();
  return img;
}

void save_raster(const Raster& img, const std::filesystem::path& path, RasterFormat format) {
  switch (format) {
    case RasterFormat::kFitsLike: save_fits(img, path); break;
    case RasterFormat::kPortableGray16: save_pgm(img, path); break;
    case RasterFormat::kFlatBinary: save_flat(img, path); break;
  }
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<char> buf;
  buf.reserve(16 + mask.size());
  buf.insert(buf.end(), kFlatMagic.begin(), kFlatMagic.end());
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(mask.width()));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(mask.height()));
  put_le<std::uint32_t>(buf, kTagU8);
  for (auto b : mask.bits()) buf.push_back(static_cast<char>(b));
  write_file(path, buf);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  const FlatPayload p = parse_flat(bytes);
  if (p.tag != kTagU8) fail(ErrorCategory::kFormat, "mask file must use the u8 dtype tag");
  BinaryMask mask(static_cast<int>(p.width), static_cast<int>(p.height));
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = p.data[i] != 0 ? 1 : 0;
  return mask;
}

}  // namespace trailkit
