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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plbf/bloom_filter.hpp"
#include "plbf/optimizer.hpp"

namespace plbf {

// An element together with the model score supplied for it.
struct ScoredElement {
  std::string element;
  double score = 0.0;
};

// Partitioned learned Bloom filter: the score range is cut at thresholds
// b_i / N and each region owns a backup Bloom filter at its own rate.
// A region at rate 1 owns no filter and accepts whatever is routed to it; a
// region that received no keys owns a zero-bit filter and rejects everything.
//
// Immutable once built; safe for concurrent queries.
class PlbfFilter {
 public:
  // Routes each key to the region containing its score and inserts it there.
  // Backups are sized with size_for_fpr(region key count, f_i, c) and seeded
  // with derive_seed(seed, region index).
  //
  // Throws InvalidArgument for an invalid plan, scores outside [0,1], or
  // keys routed to a region whose rate is 0.
  static PlbfFilter build(std::span<const ScoredElement> keys, const PartitionPlan& plan,
                          VariantConstant c, std::uint64_t seed);

  // Reassembles a filter from stored parts (used by deserialization).
  static PlbfFilter assemble(PartitionPlan plan, std::vector<BloomFilter> backups,
                             VariantConstant c);

  // Throws InvalidArgument for scores outside [0,1].
  bool query(std::string_view element, double score) const;

  // 0-based region index of a score.
  std::size_t region_of(double score) const;

  const PartitionPlan& plan() const noexcept { return plan_; }
  std::span<const BloomFilter> backups() const noexcept { return backups_; }
  VariantConstant variant() const noexcept { return c_; }
  std::size_t regions() const noexcept { return backups_.size(); }
  std::vector<double> thresholds() const;
  std::uint64_t total_bits() const noexcept;

  friend bool operator==(const PlbfFilter&, const PlbfFilter&) = default;

 private:
  PlbfFilter(PartitionPlan plan, std::vector<BloomFilter> backups, VariantConstant c)
      : plan_(std::move(plan)), backups_(std::move(backups)), c_(c) {}

  PartitionPlan plan_;
  std::vector<BloomFilter> backups_;
  VariantConstant c_;
};

// Pre-filter over all keys at f_0 = max_i f_i followed by per-region filters
// at f_i / f_0. Per-region false positive rates are unchanged.
struct SandwichPlan {
  double prefilter_fpr = 0.0;
  std::vector<double> inner_fprs;
  BloomFilter prefilter;
  std::vector<BloomFilter> inner;
  PartitionPlan plan;

  bool query(std::string_view element, double score) const;
  std::uint64_t total_bits() const noexcept;
};

// Throws InvalidArgument if any region rate is 1 or no region has a positive
// rate.
SandwichPlan sandwich_transform(const PlbfFilter& filter, std::span<const ScoredElement> keys,
                                std::uint64_t seed);

struct BitBudget {
  std::uint64_t partitioned = 0;  // sum_i ceil(n_i c log2(1/f_i))
  std::uint64_t sandwiched = 0;   // ceil(n c log2(1/f_0)) + sum_i ceil(n_i c log2(f_0/f_i))
};

// Declared budgets before and after the transform for region key counts n_i.
// The two agree up to one bit of rounding per region. Requires every f_i < 1.
BitBudget sandwich_bit_budget(std::span<const double> region_keys, std::span<const double> fprs,
                              VariantConstant c);

struct FprEstimate {
  std::uint64_t positives = 0;
  std::uint64_t queries = 0;
  double rate = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval
  double ci_high = 0.0;
};

// Throws InvalidArgument when queries == 0 or positives > queries.
FprEstimate wilson_estimate(std::uint64_t positives, std::uint64_t queries);

// Queries must not contain keys. Throws InvalidArgument for an empty set.
FprEstimate measure_fpr(const PlbfFilter& filter, std::span<const ScoredElement> queries);

// Per-region counts of the same measurement; regions that received no query
// report queries == 0 and rate 0.
std::vector<FprEstimate> measure_fpr_by_region(const PlbfFilter& filter,
                                               std::span<const ScoredElement> queries);

// Little-endian layout:
//   "PLBF" | u16 version=1 | f64 c | f64 F | u32 N | u16 k
//   | u32 boundaries[k+1] | f64 fprs[k]
//   | k x (u64 m | u32 hashes | u64 seed | ceil(m/8) bytes, LSB-first)
//   | u32 CRC32C of everything before it
std::vector<std::uint8_t> serialize(const PlbfFilter& filter);

// Throws FormatError carrying kBadMagic, kUnsupportedVersion, kTruncated,
// kChecksumMismatch or kMalformed.
PlbfFilter deserialize(std::span<const std::uint8_t> bytes);

inline constexpr std::uint16_t kFormatVersion = 1;

}  // namespace plbf
