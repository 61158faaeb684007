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

/// Checkpoint layout, all integers little-endian:
///
///   magic        4 bytes  "TKCK"
///   version      u32      1
///   depth        u32
///   base         u32      base_channels
///   input_size   u32
///   skip         u32      0 or 1
///   param_seed   u64
///   epoch        i32      last completed epoch (0 for an untrained net)
///   n_tensors    u32
///   manifest     n_tensors records:
///                  u32 name length, name bytes, u32 trainable,
///                  u32 rank, rank x u32 dims, u64 offset (in floats)
///   n_values     u64
///   values       n_values f32, the flat parameter tensor
///   checksum     u64      FNV-1a over every preceding byte
///
/// Optimiser state is not stored; a resumed run restarts the moment estimates.

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <numeric>

#include "trailkit/error.hpp"
#include "trailkit/segnet.hpp"

namespace trailkit::segnet {
namespace {

constexpr std::array<char, 4> kMagic = {'T', 'K', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a(const char* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ull;
  }
  return h;
}

template <typename T>
void put(std::vector<char>& buf, T value) {
  auto raw = std::bit_cast<std::array<char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
  buf.insert(buf.end(), raw.begin(), raw.end());
}

class Reader {
 public:
  Reader(const std::vector<char>& bytes, std::string where) : bytes_(bytes), where_(std::move(where)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::array<char, sizeof(T)> raw;
    std::memcpy(raw.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(raw.begin(), raw.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(raw);
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s(bytes_.data() + pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (bytes_.size() - pos_ < n) fail(ErrorCategory::kFormat, "truncated checkpoint " + where_);
  }
  const std::vector<char>& bytes_;
  std::string where_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_checkpoint(const NetworkParams& net, int epoch, const std::filesystem::path& path) {
  std::vector<char> buf(kMagic.begin(), kMagic.end());
  put<std::uint32_t>(buf, kVersion);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(net.config.depth));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(net.config.base_channels));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(net.config.input_size));
  put<std::uint32_t>(buf, net.config.skip_connections ? 1u : 0u);
  put<std::uint64_t>(buf, net.config.param_seed);
  put<std::int32_t>(buf, epoch);
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(net.params.size()));
  std::uint64_t offset = 0;
  for (const auto& p : net.params) {
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(p.name.size()));
    buf.insert(buf.end(), p.name.begin(), p.name.end());
    put<std::uint32_t>(buf, p.trainable ? 1u : 0u);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) put<std::uint32_t>(buf, static_cast<std::uint32_t>(d));
    put<std::uint64_t>(buf, offset);
    offset += p.value.size();
  }
  put<std::uint64_t>(buf, offset);
  for (const auto& p : net.params) {
    for (float v : p.value) put<float>(buf, v);
  }
  put<std::uint64_t>(buf, fnv1a(buf.data(), buf.size()));

  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCategory::kIo, "cannot write checkpoint " + tmp.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) fail(ErrorCategory::kIo, "failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

NetworkParams load_checkpoint(const std::filesystem::path& path, int* epoch) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::kIo, "cannot open checkpoint " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kMagic.size() + 8 || !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    fail(ErrorCategory::kFormat, path.string() + " is not a trailkit checkpoint");
  }
  {
    std::vector<char> last(bytes.end() - 8, bytes.end());
    Reader r(last, path.string());
    if (r.get<std::uint64_t>() != fnv1a(bytes.data(), bytes.size() - 8)) {
      fail(ErrorCategory::kFormat, "checksum mismatch in checkpoint " + path.string());
    }
  }
  Reader r(bytes, path.string());
  r.get_string(kMagic.size());
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion) {
    fail(ErrorCategory::kFormat, "unsupported checkpoint version " + std::to_string(version));
  }
  NetworkParams net;
  net.config.depth = static_cast<int>(r.get<std::uint32_t>());
  net.config.base_channels = static_cast<int>(r.get<std::uint32_t>());
  net.config.input_size = static_cast<int>(r.get<std::uint32_t>());
  net.config.skip_connections = r.get<std::uint32_t>() != 0;
  net.config.param_seed = r.get<std::uint64_t>();
  const auto ep = r.get<std::int32_t>();
  if (epoch) *epoch = ep;
  const auto n_tensors = r.get<std::uint32_t>();
  std::vector<std::uint64_t> offsets;
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    Param p;
    p.name = r.get_string(r.get<std::uint32_t>());
    p.trainable = r.get<std::uint32_t>() != 0;
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) fail(ErrorCategory::kFormat, "implausible tensor rank in checkpoint");
    for (std::uint32_t k = 0; k < rank; ++k) p.shape.push_back(static_cast<int>(r.get<std::uint32_t>()));
    offsets.push_back(r.get<std::uint64_t>());
    net.params.push_back(std::move(p));
  }
  const auto n_values = r.get<std::uint64_t>();
  if (n_values > (bytes.size() - r.pos()) / sizeof(float)) fail(ErrorCategory::kFormat, "truncated checkpoint values");
  std::vector<float> flat(static_cast<std::size_t>(n_values));
  for (auto& v : flat) v = r.get<float>();
  for (std::size_t i = 0; i < net.params.size(); ++i) {
    Param& p = net.params[i];
    const auto count = static_cast<std::uint64_t>(
        std::accumulate(p.shape.begin(), p.shape.end(), std::int64_t{1}, std::multiplies<>()));
    if (offsets[i] + count > n_values) fail(ErrorCategory::kFormat, "tensor " + p.name + " overruns the value block");
    p.value.assign(flat.begin() + static_cast<std::ptrdiff_t>(offsets[i]),
                   flat.begin() + static_cast<std::ptrdiff_t>(offsets[i] + count));
  }
  net.config.validate();
  return net;
}

}  // namespace trailkit::segnet
