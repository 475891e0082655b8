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

// Space / false-positive experiments over a scored dataset: FPR-vs-space
// sweeps against plain-filter and sandwich baselines, and space saved as the
// region count grows.
//
// Space is accounted with the configured variant constant c. Filters that are
// actually queried are standard Bloom filters sized with max(c, log2 e), since
// a standard filter cannot reach rate f with fewer than log2(e) log2(1/f)
// bits per key.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plbf/optimizer.hpp"
#include "plbf/plbf_filter.hpp"
#include "plbf/score_io.hpp"

namespace plbf {

enum class Method {
  kOptimalBfAccounting,  // standard filter bits / log2(e)
  kPlbf,
  kSandwich2Region,      // two-region plan, then the sandwich transform
  kStandardBf,           // c = log2(e)
};

std::string_view to_string(Method method) noexcept;
std::optional<Method> parse_method(std::string_view name) noexcept;
std::vector<Method> all_methods();

struct Dataset {
  std::vector<ScoredElement> keys;
  std::vector<ScoredElement> estimation_nonkeys;  // feeds the histogram
  std::vector<ScoredElement> evaluation_nonkeys;  // feeds FPR measurement only
};

// Splits the non-keys with split_indices(fraction, seed). Throws
// InvalidArgument if there are no keys or either non-key part is empty.
Dataset prepare_dataset(std::span<const ScoreRecord> records, double estimation_fraction,
                        std::uint64_t seed);

struct ExperimentConfig {
  std::uint32_t segments = 1000;
  std::uint32_t regions = 5;
  VariantConstant c = VariantConstant::optimal();
  double model_size_bits = 0.0;
  std::uint64_t seed = 42;
  // 0: measure on the full evaluation set; otherwise resample this many
  // queries from it with replacement.
  std::uint64_t queries = 0;
};

ScoreHistogram dataset_histogram(const Dataset& data, std::uint32_t segments);

// Physical size constant used for filters that get queried.
VariantConstant physical_variant(VariantConstant c);

struct BuildResult {
  SolveReport report;
  PlbfFilter filter;
  std::uint64_t accounted_bits = 0;  // sum of size_for_fpr(n_i, f_i, c) over built regions
  FprEstimate heldout;
};

// Histogram, solve (relaxed for k = 1, general otherwise), build with the
// physical constant, measure on the evaluation non-keys.
BuildResult build_plbf(const Dataset& data, double target_fpr, const ExperimentConfig& config);

// Filter at exactly c (no physical adjustment); what the build command writes.
PlbfFilter build_filter_exact(const Dataset& data, const SolveReport& report, VariantConstant c,
                              std::uint64_t seed);

struct SweepRow {
  Method method = Method::kPlbf;
  double target_f = 0.0;
  double total_bits = 0.0;
  double measured_fpr = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double divergence_bits = 0.0;
  std::uint32_t k = 0;
  std::uint32_t segments = 0;
  std::uint64_t seed = 0;
  std::uint64_t queries = 0;
  std::string error;  // non-empty when the row failed
};

struct SweepReport {
  std::vector<SweepRow> rows;  // sorted by (method name, target_f)
};

std::vector<double> default_fpr_sweep();

// Rows that fail (e.g. a target outside (0,1)) carry an error message; the
// rest of the sweep still runs.
SweepReport run_sweep(const Dataset& data, std::span<const double> target_fprs,
                      std::span<const Method> methods, const ExperimentConfig& config);

void write_sweep_csv(std::ostream& out, const SweepReport& report);

struct RegionSweepRow {
  std::uint32_t k = 0;
  double saved_bits = 0.0;           // c n DP_KL(N, k) - model size
  double divergence_bits = 0.0;      // DP_KL(N, k)
  std::uint64_t backup_bits = 0;     // general solver's backup space at k
  double realized_saved_bits = 0.0;  // plain filter bits - backup_bits - model size
  bool reference = false;            // the k = 25 row
};

inline constexpr std::uint32_t kReferenceRegions = 25;

// k_list must be ascending with entries in [1, N]; a k = 25 reference row is
// appended when missing and 25 <= N.
std::vector<RegionSweepRow> run_regions_sweep(const Dataset& data, double target_fpr,
                                              std::span<const std::uint32_t> k_list,
                                              const ExperimentConfig& config);

void write_regions_csv(std::ostream& out, std::span<const RegionSweepRow> rows);

}  // namespace plbf
