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

#include "plbf/experiment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>

#include "plbf/errors.hpp"
#include "plbf/hash.hpp"
#include "plbf/random.hpp"

namespace plbf {
namespace {

constexpr std::uint64_t kSplitStream = 0x5350'4C49'54ULL;  // "SPLIT"
constexpr std::uint64_t kQueryStream = 0x5155'4552'59ULL;  // "QUERY"

std::uint64_t row_seed(std::uint64_t master, Method method, double target_fpr) {
  return derive_seed(derive_seed(master, static_cast<std::uint64_t>(method) + 1),
                     std::bit_cast<std::uint64_t>(target_fpr));
}

// Evaluation queries: the full held-out set, or a seeded resample.
std::vector<ScoredElement> evaluation_queries(const Dataset& data, std::uint64_t count,
                                              std::uint64_t seed) {
  if (count == 0) return data.evaluation_nonkeys;
  Rng rng(derive_seed(seed, kQueryStream));
  std::vector<ScoredElement> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    out.push_back(data.evaluation_nonkeys[uniform_below(rng, data.evaluation_nonkeys.size())]);
  }
  return out;
}

FprEstimate measure(std::span<const ScoredElement> queries,
                    const std::function<bool(const ScoredElement&)>& accepts) {
  std::uint64_t positives = 0;
  for (const ScoredElement& q : queries) positives += accepts(q) ? 1 : 0;
  return wilson_estimate(positives, queries.size());
}

std::vector<double> region_key_counts(const PlbfFilter& filter) {
  std::vector<double> counts;
  for (const BloomFilter& b : filter.backups()) counts.push_back(static_cast<double>(b.inserted()));
  return counts;
}

std::uint64_t accounted_bits(const PlbfFilter& filter, VariantConstant c) {
  std::uint64_t total = 0;
  const auto& fprs = filter.plan().fprs;
  for (std::size_t r = 0; r < fprs.size(); ++r) {
    const std::uint64_t n = filter.backups()[r].inserted();
    if (fprs[r] > 0.0 && fprs[r] < 1.0) total += size_for_fpr(n, fprs[r], c);
  }
  return total;
}

void fill_estimate(SweepRow& row, const FprEstimate& e) {
  row.measured_fpr = e.rate;
  row.ci_low = e.ci_low;
  row.ci_high = e.ci_high;
  row.queries = e.queries;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::kOptimalBfAccounting: return "optimal_bf_accounting";
    case Method::kPlbf: return "plbf";
    case Method::kSandwich2Region: return "sandwich_2region";
    case Method::kStandardBf: return "standard_bf";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  for (Method m : all_methods()) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<Method> all_methods() {
  return {Method::kOptimalBfAccounting, Method::kPlbf, Method::kSandwich2Region,
          Method::kStandardBf};
}

Dataset prepare_dataset(std::span<const ScoreRecord> records, double estimation_fraction,
                        std::uint64_t seed) {
  Dataset data;
  data.keys = scored_elements(records, Label::kKey);
  const std::vector<ScoredElement> nonkeys = scored_elements(records, Label::kNonKey);
  if (data.keys.empty()) throw InvalidArgument("score data contains no keys");
  const IndexSplit split =
      split_indices(nonkeys.size(), estimation_fraction, derive_seed(seed, kSplitStream));
  if (split.estimation.empty() || split.evaluation.empty()) {
    throw InvalidArgument("not enough non-keys for an estimation/evaluation split");
  }
  for (std::size_t i : split.estimation) data.estimation_nonkeys.push_back(nonkeys[i]);
  for (std::size_t i : split.evaluation) data.evaluation_nonkeys.push_back(nonkeys[i]);
  return data;
}

ScoreHistogram dataset_histogram(const Dataset& data, std::uint32_t segments) {
  return build_histogram(score_sample(data.keys, Label::kKey),
                         score_sample(data.estimation_nonkeys, Label::kNonKey), segments);
}

VariantConstant physical_variant(VariantConstant c) {
  return c.value() >= std::numbers::log2e ? c : VariantConstant::standard();
}

PlbfFilter build_filter_exact(const Dataset& data, const SolveReport& report, VariantConstant c,
                              std::uint64_t seed) {
  return PlbfFilter::build(data.keys, report.plan, c, seed);
}

BuildResult build_plbf(const Dataset& data, double target_fpr, const ExperimentConfig& config) {
  const ScoreHistogram hist = dataset_histogram(data, config.segments);
  const SpaceModel model{data.keys.size(), config.c, config.model_size_bits};
  SolveReport report = solve(hist, target_fpr, config.regions, model);
  PlbfFilter filter =
      PlbfFilter::build(data.keys, report.plan, physical_variant(config.c), config.seed);
  const std::uint64_t bits = accounted_bits(filter, config.c);
  const auto queries = evaluation_queries(data, config.queries, config.seed);
  const FprEstimate heldout = measure_fpr(filter, queries);
  return BuildResult{std::move(report), std::move(filter), bits, heldout};
}

std::vector<double> default_fpr_sweep() { return {0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005}; }

SweepReport run_sweep(const Dataset& data, std::span<const double> target_fprs,
                      std::span<const Method> methods, const ExperimentConfig& config) {
  const ScoreHistogram hist = dataset_histogram(data, config.segments);
  const std::uint64_t n = data.keys.size();
  const SpaceModel model{n, config.c, config.model_size_bits};
  const VariantConstant physical = physical_variant(config.c);
  const auto queries = evaluation_queries(data, config.queries, config.seed);

  std::optional<DivergenceTable> plbf_table;
  std::optional<DivergenceTable> sandwich_table;

  SweepReport report;
  for (Method method : methods) {
    for (double target : target_fprs) {
      SweepRow row;
      row.method = method;
      row.target_f = target;
      row.segments = config.segments;
      row.seed = row_seed(config.seed, method, target);
      try {
        switch (method) {
          case Method::kStandardBf:
          case Method::kOptimalBfAccounting: {
            BloomFilter plain = BloomFilter::for_capacity(n, target, VariantConstant::standard(),
                                                          row_seed(config.seed, Method::kStandardBf, target));
            for (const ScoredElement& key : data.keys) plain.insert(key.element);
            const auto bits = static_cast<double>(plain.bit_count());
            row.total_bits = method == Method::kStandardBf ? bits : bits / std::numbers::log2e;
            row.k = 1;
            fill_estimate(row, measure(queries, [&](const ScoredElement& q) {
                            return plain.contains(q.element);
                          }));
            break;
          }
          case Method::kPlbf: {
            const std::uint32_t k = config.regions;
            SolveReport solved;
            if (k == 1) {
              solved = solve_relaxed(hist, target, 1, model);
            } else {
              if (!plbf_table) plbf_table.emplace(hist, k - 1);
              solved = solve_general(hist, *plbf_table, target, k, model);
            }
            const PlbfFilter filter = PlbfFilter::build(data.keys, solved.plan, physical, row.seed);
            row.total_bits =
                static_cast<double>(accounted_bits(filter, config.c)) + config.model_size_bits;
            row.divergence_bits = solved.divergence_bits;
            row.k = k;
            fill_estimate(row, measure_fpr(filter, queries));
            break;
          }
          case Method::kSandwich2Region: {
            if (!sandwich_table) sandwich_table.emplace(hist, 1);
            const SolveReport solved = solve_general(hist, *sandwich_table, target, 2, model);
            const PlbfFilter filter = PlbfFilter::build(data.keys, solved.plan, physical, row.seed);
            row.divergence_bits = solved.divergence_bits;
            row.k = 2;
            const auto& fprs = filter.plan().fprs;
            const bool transformable = std::all_of(fprs.begin(), fprs.end(),
                                                   [](double f) { return f < 1.0; });
            if (transformable) {
              const SandwichPlan sandwich = sandwich_transform(filter, data.keys, row.seed);
              const auto counts = region_key_counts(filter);
              row.total_bits =
                  static_cast<double>(sandwich_bit_budget(counts, fprs, config.c).sandwiched) +
                  config.model_size_bits;
              fill_estimate(row, measure(queries, [&](const ScoredElement& q) {
                              return sandwich.query(q.element, q.score);
                            }));
            } else {
              // Top region accepts outright: a sandwich with an empty pre-filter.
              row.total_bits =
                  static_cast<double>(accounted_bits(filter, config.c)) + config.model_size_bits;
              fill_estimate(row, measure_fpr(filter, queries));
            }
            break;
          }
        }
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.method != b.method) return to_string(a.method) < to_string(b.method);
    return a.target_f < b.target_f;
  });
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "method,target_f,total_bits,measured_fpr,ci_low,ci_high,divergence_bits,k,N,seed,kib,"
         "queries,error\n";
  for (const SweepRow& r : report.rows) {
    out << to_string(r.method) << ',' << format_double(r.target_f) << ','
        << format_double(r.total_bits) << ',' << format_double(r.measured_fpr) << ','
        << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ','
        << format_double(r.divergence_bits) << ',' << r.k << ',' << r.segments << ',' << r.seed
        << ',' << format_double(r.total_bits / 8192.0) << ',' << r.queries << ',';
    // Errors are free text; keep the row to one CSV field.
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << err << '\n';
  }
}

std::vector<RegionSweepRow> run_regions_sweep(const Dataset& data, double target_fpr,
                                              std::span<const std::uint32_t> k_list,
                                              const ExperimentConfig& config) {
  std::vector<std::uint32_t> ks(k_list.begin(), k_list.end());
  if (ks.empty()) throw InvalidArgument("region sweep needs at least one k");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || ks[i] > config.segments) {
      throw InvalidArgument("region counts must lie in [1, N]");
    }
    if (i > 0 && ks[i] <= ks[i - 1]) throw InvalidArgument("region counts must be ascending");
  }
  if (ks.back() < kReferenceRegions && kReferenceRegions <= config.segments) {
    ks.push_back(kReferenceRegions);
  }

  const ScoreHistogram hist = dataset_histogram(data, config.segments);
  const std::uint64_t n = data.keys.size();
  const SpaceModel model{n, config.c, config.model_size_bits};
  const DivergenceTable table(hist, ks.back());
  const std::uint64_t plain = size_for_fpr(n, target_fpr, config.c);

  std::vector<RegionSweepRow> rows;
  for (std::uint32_t k : ks) {
    RegionSweepRow row;
    row.k = k;
    row.reference = k == kReferenceRegions;
    row.divergence_bits = table.max_divergence(config.segments, k);
    row.saved_bits = space_saved(std::max(0.0, row.divergence_bits), n, config.c,
                                 config.model_size_bits);
    row.backup_bits = k == 1 ? solve_relaxed(hist, table, target_fpr, 1, model).backup_bits
                             : solve_general(hist, table, target_fpr, k, model).backup_bits;
    row.realized_saved_bits = static_cast<double>(plain) - static_cast<double>(row.backup_bits) -
                              config.model_size_bits;
    rows.push_back(row);
  }
  return rows;
}

void write_regions_csv(std::ostream& out, std::span<const RegionSweepRow> rows) {
  out << "k,saved_bits,divergence,backup_bits,realized_saved_bits,reference\n";
  for (const RegionSweepRow& r : rows) {
    out << r.k << ',' << format_double(r.saved_bits) << ',' << format_double(r.divergence_bits)
        << ',' << r.backup_bits << ',' << format_double(r.realized_saved_bits) << ','
        << (r.reference ? 1 : 0) << '\n';
  }
}

}  // namespace plbf
