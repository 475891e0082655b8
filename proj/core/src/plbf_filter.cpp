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

#include "plbf/plbf_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "plbf/errors.hpp"
#include "plbf/hash.hpp"

namespace plbf {
namespace {

constexpr double kWilsonZ = 1.959963984540054;

std::size_t route(const PartitionPlan& plan, double score) {
  const std::uint32_t segment = segment_of(score, plan.segments);
  // First region whose upper boundary reaches the segment.
  const auto it = std::lower_bound(plan.boundaries.begin() + 1, plan.boundaries.end(), segment);
  return static_cast<std::size_t>(it - (plan.boundaries.begin() + 1));
}

BloomFilter region_filter(std::uint64_t n, double f, VariantConstant c, std::uint64_t seed) {
  if (f >= 1.0 || f <= 0.0 || n == 0) {
    const std::uint32_t hashes = (f > 0.0 && f < 1.0) ? hashes_for_fpr(f) : 1U;
    return BloomFilter(BloomParams{0, hashes, seed});
  }
  return BloomFilter::for_capacity(n, f, c, seed);
}

std::vector<std::vector<std::size_t>> bucket_keys(const PartitionPlan& plan,
                                                  std::span<const ScoredElement> keys) {
  std::vector<std::vector<std::size_t>> buckets(plan.regions());
  for (std::size_t i = 0; i < keys.size(); ++i) buckets[route(plan, keys[i].score)].push_back(i);
  return buckets;
}

}  // namespace

PlbfFilter PlbfFilter::build(std::span<const ScoredElement> keys, const PartitionPlan& plan,
                             VariantConstant c, std::uint64_t seed) {
  plan.validate();
  const auto buckets = bucket_keys(plan, keys);
  std::vector<BloomFilter> backups;
  backups.reserve(plan.regions());
  for (std::size_t r = 0; r < plan.regions(); ++r) {
    const double f = plan.fprs[r];
    if (f <= 0.0 && !buckets[r].empty()) {
      throw InvalidArgument("region " + std::to_string(r) +
                            " holds keys but the plan assigns it rate 0");
    }
    BloomFilter filter = region_filter(buckets[r].size(), f, c, derive_seed(seed, r));
    if (f < 1.0) {
      for (std::size_t i : buckets[r]) filter.insert(keys[i].element);
    }
    backups.push_back(std::move(filter));
  }
  return PlbfFilter(plan, std::move(backups), c);
}

PlbfFilter PlbfFilter::assemble(PartitionPlan plan, std::vector<BloomFilter> backups,
                                VariantConstant c) {
  plan.validate();
  if (backups.size() != plan.regions()) {
    throw InvalidArgument("one backup filter per region required");
  }
  for (std::size_t r = 0; r < backups.size(); ++r) {
    if (plan.fprs[r] >= 1.0 && backups[r].bit_count() != 0) {
      throw InvalidArgument("an accept-all region cannot carry a filter");
    }
  }
  return PlbfFilter(std::move(plan), std::move(backups), c);
}

std::size_t PlbfFilter::region_of(double score) const { return route(plan_, score); }

bool PlbfFilter::query(std::string_view element, double score) const {
  const std::size_t r = route(plan_, score);
  if (plan_.fprs[r] >= 1.0) return true;
  return backups_[r].contains(element);
}

std::vector<double> PlbfFilter::thresholds() const {
  std::vector<double> t;
  t.reserve(plan_.boundaries.size());
  for (std::uint32_t b : plan_.boundaries) {
    t.push_back(static_cast<double>(b) / static_cast<double>(plan_.segments));
  }
  return t;
}

std::uint64_t PlbfFilter::total_bits() const noexcept {
  std::uint64_t total = 0;
  for (const BloomFilter& b : backups_) total += b.bit_count();
  return total;
}

bool SandwichPlan::query(std::string_view element, double score) const {
  if (!prefilter.contains(element)) return false;
  const std::size_t r = route(plan, score);
  if (inner_fprs[r] >= 1.0) return true;
  return inner[r].contains(element);
}

std::uint64_t SandwichPlan::total_bits() const noexcept {
  std::uint64_t total = prefilter.bit_count();
  for (const BloomFilter& b : inner) total += b.bit_count();
  return total;
}

SandwichPlan sandwich_transform(const PlbfFilter& filter, std::span<const ScoredElement> keys,
                                std::uint64_t seed) {
  const PartitionPlan& plan = filter.plan();
  for (double f : plan.fprs) {
    if (f >= 1.0) throw InvalidArgument("sandwich transform needs every region rate below 1");
  }
  const double f0 = *std::max_element(plan.fprs.begin(), plan.fprs.end());
  if (!(f0 > 0.0)) throw InvalidArgument("sandwich transform needs a positive region rate");

  SandwichPlan out;
  out.plan = plan;
  out.prefilter_fpr = f0;
  out.inner_fprs.reserve(plan.regions());
  for (double f : plan.fprs) out.inner_fprs.push_back(std::min(1.0, f / f0));

  out.prefilter = region_filter(keys.size(), f0, filter.variant(), derive_seed(seed, 0xFFFF));
  for (const ScoredElement& key : keys) out.prefilter.insert(key.element);

  const auto buckets = bucket_keys(plan, keys);
  for (std::size_t r = 0; r < plan.regions(); ++r) {
    BloomFilter inner =
        region_filter(buckets[r].size(), out.inner_fprs[r], filter.variant(), derive_seed(seed, r));
    if (out.inner_fprs[r] < 1.0) {
      for (std::size_t i : buckets[r]) inner.insert(keys[i].element);
    }
    out.inner.push_back(std::move(inner));
  }
  return out;
}

BitBudget sandwich_bit_budget(std::span<const double> region_keys, std::span<const double> fprs,
                              VariantConstant c) {
  if (region_keys.size() != fprs.size() || fprs.empty()) {
    throw InvalidArgument("one rate per region required");
  }
  for (double f : fprs) {
    if (!(f > 0.0 && f < 1.0)) throw InvalidArgument("sandwich budget needs rates in (0,1)");
  }
  const double f0 = *std::max_element(fprs.begin(), fprs.end());
  const double n = std::accumulate(region_keys.begin(), region_keys.end(), 0.0);
  auto bits = [&](double keys, double ratio) {
    if (keys <= 0.0) return std::uint64_t{0};
    return static_cast<std::uint64_t>(std::ceil(keys * c.value() * std::log2(ratio)));
  };
  BitBudget budget;
  budget.sandwiched = bits(n, 1.0 / f0);
  for (std::size_t i = 0; i < fprs.size(); ++i) {
    budget.partitioned += bits(region_keys[i], 1.0 / fprs[i]);
    budget.sandwiched += bits(region_keys[i], f0 / fprs[i]);
  }
  return budget;
}

FprEstimate wilson_estimate(std::uint64_t positives, std::uint64_t queries) {
  if (queries == 0) throw InvalidArgument("fpr estimate needs at least one query");
  if (positives > queries) throw InvalidArgument("more positives than queries");
  const double n = static_cast<double>(queries);
  const double p = static_cast<double>(positives) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  FprEstimate e;
  e.positives = positives;
  e.queries = queries;
  e.rate = p;
  e.ci_low = std::max(0.0, std::min(p, centre - half));
  e.ci_high = std::min(1.0, std::max(p, centre + half));
  return e;
}

FprEstimate measure_fpr(const PlbfFilter& filter, std::span<const ScoredElement> queries) {
  if (queries.empty()) throw InvalidArgument("fpr measurement needs at least one query");
  std::uint64_t positives = 0;
  for (const ScoredElement& q : queries) positives += filter.query(q.element, q.score) ? 1 : 0;
  return wilson_estimate(positives, queries.size());
}

std::vector<FprEstimate> measure_fpr_by_region(const PlbfFilter& filter,
                                               std::span<const ScoredElement> queries) {
  std::vector<std::uint64_t> positives(filter.regions(), 0);
  std::vector<std::uint64_t> totals(filter.regions(), 0);
  for (const ScoredElement& q : queries) {
    const std::size_t r = filter.region_of(q.score);
    ++totals[r];
    positives[r] += filter.query(q.element, q.score) ? 1 : 0;
  }
  std::vector<FprEstimate> out(filter.regions());
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (totals[r] > 0) out[r] = wilson_estimate(positives[r], totals[r]);
  }
  return out;
}

}  // namespace plbf
