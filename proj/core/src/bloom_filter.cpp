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

#include "plbf/bloom_filter.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "plbf/errors.hpp"
#include "plbf/hash.hpp"

namespace plbf {
namespace {

constexpr std::uint64_t kSecondHashSalt = 0xA0761D6478BD642FULL;

void require_open_unit(double f, const char* what) {
  if (!(f > 0.0 && f < 1.0)) {
    throw InvalidArgument(std::string(what) + " must lie in (0,1), got " + std::to_string(f));
  }
}

std::size_t byte_count(std::uint64_t bits) { return static_cast<std::size_t>((bits + 7) / 8); }

}  // namespace

VariantConstant::VariantConstant(double c) : c_(c) {
  if (!std::isfinite(c) || c < 1.0) {
    throw InvalidArgument("variant constant must be >= 1, got " + std::to_string(c));
  }
}

std::uint64_t size_for_fpr(std::uint64_t n, double f, VariantConstant c) {
  require_open_unit(f, "target fpr");
  if (n == 0) return 0;
  const double bits = c.value() * static_cast<double>(n) * std::log2(1.0 / f);
  return static_cast<std::uint64_t>(std::ceil(bits));
}

std::uint32_t hashes_for_fpr(double f) {
  require_open_unit(f, "target fpr");
  const double k = std::round(std::log2(1.0 / f));
  return k < 1.0 ? 1U : static_cast<std::uint32_t>(k);
}

double theoretical_fpr(std::uint64_t m, std::uint64_t n, std::uint32_t k) {
  if (m == 0 || k == 0) throw InvalidArgument("theoretical_fpr needs m >= 1 and k >= 1");
  if (n == 0) return 0.0;
  // 1 - (1 - 1/m)^(kn), kept accurate for large m.
  const double kn = static_cast<double>(k) * static_cast<double>(n);
  const double set_fraction = -std::expm1(kn * std::log1p(-1.0 / static_cast<double>(m)));
  return std::pow(set_fraction, static_cast<double>(k));
}

BloomFilter::BloomFilter(BloomParams params) : params_(params), bytes_(byte_count(params.bits)) {
  if (params.hashes == 0) throw InvalidArgument("bloom filter needs at least one hash");
}

BloomFilter BloomFilter::for_capacity(std::uint64_t n, double f, VariantConstant c,
                                      std::uint64_t seed) {
  return BloomFilter(BloomParams{size_for_fpr(n, f, c), hashes_for_fpr(f), seed});
}

BloomFilter BloomFilter::from_bytes(BloomParams params, std::vector<std::uint8_t> bytes) {
  BloomFilter filter(params);
  if (bytes.size() != filter.bytes_.size()) {
    throw InvalidArgument("bit array holds " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string(filter.bytes_.size()));
  }
  if (const unsigned tail = params.bits % 8; tail != 0 && (bytes.back() >> tail) != 0) {
    throw InvalidArgument("bits set beyond the filter length");
  }
  filter.bytes_ = std::move(bytes);
  return filter;
}

BloomFilter::Probe BloomFilter::probe(std::string_view element) const noexcept {
  return {xxh64(element, params_.seed), xxh64(element, params_.seed ^ kSecondHashSalt)};
}

void BloomFilter::insert(std::string_view element) {
  ++inserted_;
  const std::uint64_t m = params_.bits;
  if (m == 0) return;
  const auto [h1, h2] = probe(element);
  for (std::uint32_t i = 0; i < params_.hashes; ++i) {
    const std::uint64_t pos = (h1 + i * h2) % m;
    bytes_[pos >> 3] |= static_cast<std::uint8_t>(1U << (pos & 7));
  }
}

bool BloomFilter::contains(std::string_view element) const {
  const std::uint64_t m = params_.bits;
  if (m == 0) return false;
  const auto [h1, h2] = probe(element);
  for (std::uint32_t i = 0; i < params_.hashes; ++i) {
    const std::uint64_t pos = (h1 + i * h2) % m;
    if ((bytes_[pos >> 3] & (1U << (pos & 7))) == 0) return false;
  }
  return true;
}

std::uint64_t BloomFilter::popcount() const noexcept {
  std::uint64_t total = 0;
  for (std::uint8_t b : bytes_) total += static_cast<std::uint64_t>(std::popcount(b));
  return total;
}

}  // namespace plbf
