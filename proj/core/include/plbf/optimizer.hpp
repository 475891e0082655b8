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

// Threshold and per-region false positive rate selection.
//
// Given per-segment key masses g' and non-key masses h', a plan with k regions
// assigns region i the segments b_{i-1}+1 .. b_i and a backup filter at rate
// f_i. Backup space is  sum_i c * n * g_i * log2(1/f_i)  subject to
// sum_i h_i * f_i = F and f_i <= 1. Without the cap the optimum is
// f_i = F * g_i / h_i, and the space becomes c * n * (log2(1/F) - D_KL(g||h)),
// so good thresholds are the ones that maximize the region-level divergence.
//
// All logarithms are base 2; divergences are in bits.

#include <cstdint>
#include <span>
#include <vector>

#include "plbf/bloom_filter.hpp"
#include "plbf/score_space.hpp"

namespace plbf {

struct PartitionPlan {
  std::uint32_t segments = 0;              // N
  std::vector<std::uint32_t> boundaries;   // b_0 = 0 < b_1 < ... < b_k = N
  std::vector<double> fprs;                // f_1 .. f_k
  double target_fpr = 0.0;                 // F

  std::size_t regions() const noexcept { return fprs.size(); }

  // Throws InvalidArgument if boundaries do not partition 1..N or a rate
  // falls outside [0,1]. A rate of 0 is legal only as the "empty region" rate.
  void validate() const;

  friend bool operator==(const PartitionPlan&, const PartitionPlan&) = default;
};

// Throws InvalidArgument unless b_0 = 0 < b_1 < ... < b_k = n_segments, k >= 1.
void validate_boundaries(std::span<const std::uint32_t> boundaries, std::uint32_t n_segments);

struct RegionMasses {
  std::vector<double> keys;     // g_i
  std::vector<double> nonkeys;  // h_i
};

RegionMasses region_masses(const ScoreHistogram& hist, std::span<const std::uint32_t> boundaries);

// sum_i g_i log2(g_i / h_i), with 0 log 0 = 0.
double kl_divergence(std::span<const double> key_mass, std::span<const double> nonkey_mass);
double kl_divergence(const ScoreHistogram& hist, std::span<const std::uint32_t> boundaries);

// DP_KL(n, j): the largest divergence obtainable by cutting the first n
// segments into j contiguous regions. Filling the table costs O(N^2 k).
// Equal-value splits resolve to the smaller boundary index.
class DivergenceTable {
 public:
  DivergenceTable(const ScoreHistogram& hist, std::uint32_t max_regions);

  std::uint32_t segments() const noexcept { return n_; }
  std::uint32_t max_regions() const noexcept { return k_; }

  // 1 <= regions <= min(prefix, max_regions())
  double max_divergence(std::uint32_t prefix, std::uint32_t regions) const;
  std::vector<std::uint32_t> boundaries(std::uint32_t prefix, std::uint32_t regions) const;

  // Divergence term of the single region covering segments from+1 .. to.
  double region_term(std::uint32_t from, std::uint32_t to) const;

 private:
  std::size_t cell(std::uint32_t regions, std::uint32_t prefix) const noexcept {
    return static_cast<std::size_t>(regions) * (n_ + 1) + prefix;
  }

  std::uint32_t n_;
  std::uint32_t k_;
  std::vector<long double> key_prefix_;
  std::vector<long double> nonkey_prefix_;
  std::vector<double> value_;
  std::vector<std::uint32_t> split_;
};

// Boundaries achieving DP_KL(N, k). Throws InvalidArgument unless 1 <= k <= N.
std::vector<std::uint32_t> max_divergence_partition(const ScoreHistogram& hist, std::uint32_t k);

// Optimal per-region rates for fixed thresholds. Starts from the unconstrained
// optimum F g_i / h_i, then repeatedly caps rates above 1 and rescales the
// rest as g_i (F - H_capped) / (h_i (1 - G_capped)) until no rate exceeds 1.
// The result satisfies sum h_i f_i = F. Regions with g_i = 0 get f_i = 0.
//
// Throws InfeasibleTarget unless 0 < F < 1; InvalidArgument for mismatched
// sizes, masses that do not sum to 1, or h_i <= 0.
std::vector<double> optimal_fprs(std::span<const double> key_mass,
                                 std::span<const double> nonkey_mass, double target_fpr);

// sum_i ceil(n g_i c log2(1/f_i)); regions with f_i = 1 or g_i = 0 cost nothing.
std::uint64_t space_used(std::span<const double> key_mass, std::span<const double> fprs,
                         std::uint64_t n_keys, VariantConstant c);

// c n D - model_size; negative when the model costs more than it saves.
double space_saved(double divergence_bits, std::uint64_t n_keys, VariantConstant c,
                   double model_size_bits);

// D / log2(1/F) - model_size / (c n log2(1/F))
double relative_space_saved(double divergence_bits, double target_fpr, std::uint64_t n_keys,
                            VariantConstant c, double model_size_bits);

struct SpaceModel {
  std::uint64_t n_keys = 0;
  VariantConstant c = VariantConstant::optimal();
  double model_size_bits = 0.0;
};

struct RegionReport {
  double key_mass = 0.0;     // g_i
  double nonkey_mass = 0.0;  // h_i
  double fpr = 0.0;          // f_i
  std::uint64_t bits = 0;    // ceil(n g_i c log2(1/f_i))
};

struct SolveReport {
  PartitionPlan plan;
  double divergence_bits = 0.0;  // region-level D_KL of the plan
  std::uint64_t backup_bits = 0;
  double saved_bits = 0.0;       // c n D_KL - model size
  std::vector<RegionReport> regions;

  std::uint64_t n_keys = 0;
  double c = 1.0;
  double model_size_bits = 0.0;
  std::uint64_t plain_bits = 0;  // single filter at F, same c
};

// Thresholds from the divergence DP over all N segments, rates from
// optimal_fprs. Throws InfeasibleTarget / InvalidArgument on bad F or k.
SolveReport solve_relaxed(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                          const SpaceModel& model);
SolveReport solve_relaxed(const ScoreHistogram& hist, const DivergenceTable& table,
                          double target_fpr, std::uint32_t k, const SpaceModel& model);

// Tries every start for the last region (its lower boundary b_{k-1} ranges
// over k-1 .. N-1), fills the remaining prefix with the k-1 region DP
// optimum, applies optimal_fprs and keeps the candidate with the least
// backup space; ties go to the smaller boundary. Requires k >= 2.
//
// Candidates are ranked by the unrounded space; when a candidate needs no
// capping its objective is evaluated from the same DP terms that
// solve_relaxed maximizes, so the two agree whenever no rate is capped.
SolveReport solve_general(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                          const SpaceModel& model);
SolveReport solve_general(const ScoreHistogram& hist, const DivergenceTable& table,
                          double target_fpr, std::uint32_t k, const SpaceModel& model);

// solve_relaxed for k == 1, solve_general otherwise.
SolveReport solve(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                  const SpaceModel& model);

}  // namespace plbf
