// Copyright 2026 The PLBF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "plbf/errors.hpp"
#include "plbf/hash.hpp"
#include "plbf/plbf_filter.hpp"

namespace plbf {

std::string_view to_string(FormatErrc code) noexcept {
  switch (code) {
    case FormatErrc::kBadMagic: return "bad magic";
    case FormatErrc::kUnsupportedVersion: return "unsupported version";
    case FormatErrc::kTruncated: return "truncated payload";
    case FormatErrc::kChecksumMismatch: return "checksum mismatch";
    case FormatErrc::kMalformed: return "malformed payload";
  }
  return "unknown format error";
}

namespace {

constexpr std::uint8_t kMagic[4] = {'P', 'L', 'B', 'F'};

class Writer {
 public:
  template <typename T>
  void put(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(u & 0xFF));
      if constexpr (sizeof(T) > 1) u >>= 8;
    }
  }
  void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
  void put_bytes(std::span<const std::uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T get(const char* field) {
    need(sizeof(T), field);
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) {
      u = static_cast<decltype(u)>((static_cast<std::uint64_t>(u) << 8) | in_[pos_ + i]);
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double get_f64(const char* field) { return std::bit_cast<double>(get<std::uint64_t>(field)); }
  std::span<const std::uint8_t> take(std::uint64_t n, const char* field) {
    need(n, field);
    auto out = in_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return out;
  }
  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return in_.size() - pos_; }

 private:
  void need(std::uint64_t n, const char* field) const {
    if (n > remaining()) {
      throw FormatError(FormatErrc::kTruncated, std::string("stream ends inside ") + field);
    }
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

struct RawBackup {
  BloomParams params;
  std::span<const std::uint8_t> bits;
};

}  // namespace

std::vector<std::uint8_t> serialize(const PlbfFilter& filter) {
  const PartitionPlan& plan = filter.plan();
  if (plan.regions() > std::numeric_limits<std::uint16_t>::max()) {
    throw InvalidArgument("too many regions to serialize");
  }
  Writer w;
  w.put_bytes(kMagic);
  w.put(kFormatVersion);
  w.put_f64(filter.variant().value());
  w.put_f64(plan.target_fpr);
  w.put(plan.segments);
  w.put(static_cast<std::uint16_t>(plan.regions()));
  for (std::uint32_t b : plan.boundaries) w.put(b);
  for (double f : plan.fprs) w.put_f64(f);
  for (const BloomFilter& backup : filter.backups()) {
    w.put(backup.params().bits);
    w.put(backup.params().hashes);
    w.put(backup.params().seed);
    w.put_bytes(backup.bytes());
  }
  const std::uint32_t crc = crc32c(std::as_bytes(std::span(w.bytes())));
  w.put(crc);
  return std::move(w.bytes());
}

PlbfFilter deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw FormatError(FormatErrc::kBadMagic, "stream does not start with PLBF");
  }
  const auto version = r.get<std::uint16_t>("version");
  if (version != kFormatVersion) {
    throw FormatError(FormatErrc::kUnsupportedVersion, "version " + std::to_string(version));
  }

  // Structure first so a short stream reports truncation, then the checksum,
  // then semantic validation of the decoded fields.
  const double c = r.get_f64("variant constant");
  PartitionPlan plan;
  plan.target_fpr = r.get_f64("target fpr");
  plan.segments = r.get<std::uint32_t>("segment count");
  const auto k = r.get<std::uint16_t>("region count");
  plan.boundaries.resize(static_cast<std::size_t>(k) + 1);
  for (auto& b : plan.boundaries) b = r.get<std::uint32_t>("boundaries");
  plan.fprs.resize(k);
  for (auto& f : plan.fprs) f = r.get_f64("region rates");

  std::vector<RawBackup> raw(k);
  for (auto& backup : raw) {
    backup.params.bits = r.get<std::uint64_t>("filter bit count");
    backup.params.hashes = r.get<std::uint32_t>("filter hash count");
    backup.params.seed = r.get<std::uint64_t>("filter seed");
    backup.bits = r.take(backup.params.bits / 8 + (backup.params.bits % 8 != 0), "filter bits");
  }
  const std::size_t body = r.position();
  const auto stored_crc = r.get<std::uint32_t>("checksum");
  if (r.remaining() != 0) {
    throw FormatError(FormatErrc::kMalformed,
                      std::to_string(r.remaining()) + " trailing bytes after checksum");
  }
  if (crc32c(std::as_bytes(bytes.first(body))) != stored_crc) {
    throw FormatError(FormatErrc::kChecksumMismatch, "stored CRC32C does not match payload");
  }

  try {
    std::vector<BloomFilter> backups;
    backups.reserve(k);
    for (const RawBackup& backup : raw) {
      backups.push_back(BloomFilter::from_bytes(
          backup.params, std::vector<std::uint8_t>(backup.bits.begin(), backup.bits.end())));
    }
    if (!(plan.target_fpr > 0.0 && plan.target_fpr < 1.0)) {
      throw InvalidArgument("target fpr outside (0,1)");
    }
    return PlbfFilter::assemble(std::move(plan), std::move(backups), VariantConstant(c));
  } catch (const InvalidArgument& e) {
    throw FormatError(FormatErrc::kMalformed, e.what());
  }
}

}  // namespace plbf
