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

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

namespace plbf {

// Space multiplier of a backup-filter family: a filter holding n keys at
// false positive rate f occupies c * n * log2(1/f) bits.
class VariantConstant {
 public:
  // Throws InvalidArgument unless c >= 1 and finite.
  explicit VariantConstant(double c);

  static VariantConstant standard() { return VariantConstant(std::numbers::log2e); }
  static VariantConstant optimal() { return VariantConstant(1.0); }

  double value() const noexcept { return c_; }

  friend bool operator==(VariantConstant, VariantConstant) = default;

 private:
  double c_;
};

struct BloomParams {
  std::uint64_t bits = 0;      // m; 0 only for the empty (zero-key) filter
  std::uint32_t hashes = 1;    // k
  std::uint64_t seed = 0;

  friend bool operator==(const BloomParams&, const BloomParams&) = default;
};

// ceil(c * n * log2(1/f)); 0 when n == 0. Throws InvalidArgument for f outside (0,1).
std::uint64_t size_for_fpr(std::uint64_t n, double f, VariantConstant c);

// max(1, round(log2(1/f))). Throws InvalidArgument for f outside (0,1).
std::uint32_t hashes_for_fpr(double f);

// (1 - (1 - 1/m)^(k n))^k
double theoretical_fpr(std::uint64_t m, std::uint64_t n, std::uint32_t k);

// Standard Bloom filter with double hashing: probe i lands at
// (h1 + i * h2) mod m where h1, h2 are two seeded XXH64 values of the element.
//
// A filter with m == 0 holds no bits and rejects every query; it represents a
// region that received no keys. Construction is single-writer; a filter that
// is no longer mutated may be queried from any number of threads.
class BloomFilter {
 public:
  BloomFilter() = default;
  // Throws InvalidArgument if hashes == 0.
  explicit BloomFilter(BloomParams params);

  // Sized with size_for_fpr / hashes_for_fpr.
  static BloomFilter for_capacity(std::uint64_t n, double f, VariantConstant c,
                                  std::uint64_t seed);

  // Adopts a raw bit array (ceil(m/8) bytes, bit i at byte i/8, LSB first).
  // Bits past m in the last byte must be zero.
  static BloomFilter from_bytes(BloomParams params, std::vector<std::uint8_t> bytes);

  void insert(std::string_view element);
  bool contains(std::string_view element) const;

  const BloomParams& params() const noexcept { return params_; }
  std::uint64_t bit_count() const noexcept { return params_.bits; }
  std::uint32_t hash_count() const noexcept { return params_.hashes; }
  // Number of insert() calls on this instance; not persisted by serialization.
  std::uint64_t inserted() const noexcept { return inserted_; }
  std::uint64_t popcount() const noexcept;
  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  friend bool operator==(const BloomFilter& a, const BloomFilter& b) {
    return a.params_ == b.params_ && a.bytes_ == b.bytes_;
  }

 private:
  struct Probe {
    std::uint64_t h1;
    std::uint64_t h2;
  };
  Probe probe(std::string_view element) const noexcept;

  BloomParams params_{};
  std::vector<std::uint8_t> bytes_;
  std::uint64_t inserted_ = 0;
};

}  // namespace plbf
