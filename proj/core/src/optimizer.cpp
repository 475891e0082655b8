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

#include "plbf/optimizer.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "plbf/errors.hpp"

namespace plbf {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMassSumTolerance = 1e-6;

void require_target(double target_fpr) {
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw InfeasibleTarget("target fpr must lie in (0,1), got " + std::to_string(target_fpr));
  }
}

void require_regions(std::uint32_t k, std::uint32_t n) {
  if (k < 1 || k > n) {
    throw InvalidArgument("region count must lie in [1, " + std::to_string(n) + "], got " +
                          std::to_string(k));
  }
}

double divergence_term(double g, double h) {
  if (g <= 0.0) return 0.0;
  return g * std::log2(g / h);
}

SolveReport make_report(PartitionPlan plan, const RegionMasses& masses, double divergence,
                        const SpaceModel& model) {
  SolveReport report;
  report.n_keys = model.n_keys;
  report.c = model.c.value();
  report.model_size_bits = model.model_size_bits;
  report.divergence_bits = divergence;
  report.regions.reserve(plan.regions());
  for (std::size_t i = 0; i < plan.regions(); ++i) {
    const double g = masses.keys[i];
    const double f = plan.fprs[i];
    const std::uint64_t bits = space_used(std::span(&g, 1), std::span(&f, 1), model.n_keys, model.c);
    report.regions.push_back({g, masses.nonkeys[i], f, bits});
    report.backup_bits += bits;
  }
  report.plain_bits = size_for_fpr(model.n_keys, plan.target_fpr, model.c);
  report.saved_bits = space_saved(divergence, model.n_keys, model.c, model.model_size_bits);
  report.plan = std::move(plan);
  return report;
}

}  // namespace

void validate_boundaries(std::span<const std::uint32_t> boundaries, std::uint32_t n_segments) {
  if (boundaries.size() < 2) throw InvalidArgument("a partition needs at least one region");
  if (boundaries.front() != 0 || boundaries.back() != n_segments) {
    throw InvalidArgument("boundaries must start at 0 and end at N=" + std::to_string(n_segments));
  }
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (boundaries[i] <= boundaries[i - 1]) {
      throw InvalidArgument("boundaries must be strictly increasing");
    }
  }
}

void PartitionPlan::validate() const {
  if (segments == 0) throw InvalidArgument("plan has no segments");
  validate_boundaries(boundaries, segments);
  if (fprs.size() + 1 != boundaries.size()) {
    throw InvalidArgument("plan needs one rate per region");
  }
  for (double f : fprs) {
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("region rates must lie in [0,1]");
  }
}

RegionMasses region_masses(const ScoreHistogram& hist, std::span<const std::uint32_t> boundaries) {
  validate_boundaries(boundaries, hist.segments());
  const auto g = hist.key_mass();
  const auto h = hist.nonkey_mass();
  RegionMasses out;
  out.keys.reserve(boundaries.size() - 1);
  out.nonkeys.reserve(boundaries.size() - 1);
  for (std::size_t r = 1; r < boundaries.size(); ++r) {
    long double gs = 0.0L;
    long double hs = 0.0L;
    for (std::uint32_t j = boundaries[r - 1]; j < boundaries[r]; ++j) {
      gs += g[j];
      hs += h[j];
    }
    out.keys.push_back(static_cast<double>(gs));
    out.nonkeys.push_back(static_cast<double>(hs));
  }
  return out;
}

double kl_divergence(std::span<const double> key_mass, std::span<const double> nonkey_mass) {
  if (key_mass.size() != nonkey_mass.size()) throw InvalidArgument("mass arrays differ in length");
  double total = 0.0;
  for (std::size_t i = 0; i < key_mass.size(); ++i) {
    total += divergence_term(key_mass[i], nonkey_mass[i]);
  }
  return total;
}

double kl_divergence(const ScoreHistogram& hist, std::span<const std::uint32_t> boundaries) {
  const RegionMasses m = region_masses(hist, boundaries);
  return kl_divergence(m.keys, m.nonkeys);
}

DivergenceTable::DivergenceTable(const ScoreHistogram& hist, std::uint32_t max_regions)
    : n_(hist.segments()), k_(max_regions) {
  require_regions(max_regions, n_);
  key_prefix_.assign(n_ + 1, 0.0L);
  nonkey_prefix_.assign(n_ + 1, 0.0L);
  for (std::uint32_t j = 0; j < n_; ++j) {
    key_prefix_[j + 1] = key_prefix_[j] + hist.key_mass()[j];
    nonkey_prefix_[j + 1] = nonkey_prefix_[j] + hist.nonkey_mass()[j];
  }

  value_.assign(static_cast<std::size_t>(k_ + 1) * (n_ + 1), kNegInf);
  split_.assign(value_.size(), 0);
  value_[cell(0, 0)] = 0.0;
  for (std::uint32_t j = 1; j <= k_; ++j) {
    for (std::uint32_t n = j; n <= n_; ++n) {
      double best = kNegInf;
      std::uint32_t best_split = j - 1;
      for (std::uint32_t i = j - 1; i < n; ++i) {
        const double v = value_[cell(j - 1, i)] + region_term(i, n);
        if (v > best) {
          best = v;
          best_split = i;
        }
      }
      value_[cell(j, n)] = best;
      split_[cell(j, n)] = best_split;
    }
  }
}

double DivergenceTable::region_term(std::uint32_t from, std::uint32_t to) const {
  const auto g = static_cast<double>(key_prefix_[to] - key_prefix_[from]);
  const auto h = static_cast<double>(nonkey_prefix_[to] - nonkey_prefix_[from]);
  return divergence_term(g, h);
}

double DivergenceTable::max_divergence(std::uint32_t prefix, std::uint32_t regions) const {
  if (prefix > n_ || regions < 1 || regions > k_ || regions > prefix) {
    throw InvalidArgument("divergence table query out of range");
  }
  return value_[cell(regions, prefix)];
}

std::vector<std::uint32_t> DivergenceTable::boundaries(std::uint32_t prefix,
                                                       std::uint32_t regions) const {
  (void)max_divergence(prefix, regions);
  std::vector<std::uint32_t> out(regions + 1);
  out[regions] = prefix;
  for (std::uint32_t j = regions; j >= 1; --j) out[j - 1] = split_[cell(j, out[j])];
  return out;
}

std::vector<std::uint32_t> max_divergence_partition(const ScoreHistogram& hist, std::uint32_t k) {
  require_regions(k, hist.segments());
  return DivergenceTable(hist, k).boundaries(hist.segments(), k);
}

std::vector<double> optimal_fprs(std::span<const double> key_mass,
                                 std::span<const double> nonkey_mass, double target_fpr) {
  require_target(target_fpr);
  const std::size_t k = key_mass.size();
  if (k == 0 || nonkey_mass.size() != k) {
    throw InvalidArgument("key and non-key region masses must be non-empty and equal in length");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(key_mass[i] >= 0.0)) throw InvalidArgument("region key mass must be >= 0");
    if (!(nonkey_mass[i] > 0.0)) throw InvalidArgument("region non-key mass must be > 0");
  }
  const double g_total = std::accumulate(key_mass.begin(), key_mass.end(), 0.0);
  const double h_total = std::accumulate(nonkey_mass.begin(), nonkey_mass.end(), 0.0);
  if (std::abs(g_total - 1.0) > kMassSumTolerance || std::abs(h_total - 1.0) > kMassSumTolerance) {
    throw InvalidArgument("region masses must each sum to 1");
  }

  std::vector<double> f(k);
  for (std::size_t i = 0; i < k; ++i) f[i] = key_mass[i] * target_fpr / nonkey_mass[i];

  auto any_above_one = [&] {
    for (double x : f) {
      if (x > 1.0) return true;
    }
    return false;
  };
  while (any_above_one()) {
    double g_capped = 0.0;
    double h_capped = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (f[i] >= 1.0) {
        f[i] = 1.0;
        g_capped += key_mass[i];
        h_capped += nonkey_mass[i];
      }
    }
    // Capped non-key mass stays below F and some region stays uncapped
    // whenever 0 < F < 1 and the masses are normalized.
    if (!(g_capped < 1.0) || !(h_capped < target_fpr)) {
      throw std::logic_error("rate capping consumed every region");
    }
    const double scale = (target_fpr - h_capped) / (1.0 - g_capped);
    for (std::size_t i = 0; i < k; ++i) {
      if (f[i] < 1.0) f[i] = key_mass[i] * scale / nonkey_mass[i];
    }
  }
  return f;
}

std::uint64_t space_used(std::span<const double> key_mass, std::span<const double> fprs,
                         std::uint64_t n_keys, VariantConstant c) {
  if (key_mass.size() != fprs.size()) throw InvalidArgument("one rate per region required");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < fprs.size(); ++i) {
    const double g = key_mass[i];
    const double f = fprs[i];
    if (g <= 0.0 || f >= 1.0) continue;
    if (!(f > 0.0)) throw InvalidArgument("a region holding keys needs a positive rate");
    const double bits = static_cast<double>(n_keys) * g * c.value() * std::log2(1.0 / f);
    total += static_cast<std::uint64_t>(std::ceil(bits));
  }
  return total;
}

double space_saved(double divergence_bits, std::uint64_t n_keys, VariantConstant c,
                   double model_size_bits) {
  if (!(divergence_bits >= 0.0) || !(model_size_bits >= 0.0)) {
    throw InvalidArgument("divergence and model size must be non-negative");
  }
  return c.value() * static_cast<double>(n_keys) * divergence_bits - model_size_bits;
}

double relative_space_saved(double divergence_bits, double target_fpr, std::uint64_t n_keys,
                            VariantConstant c, double model_size_bits) {
  require_target(target_fpr);
  if (!(model_size_bits >= 0.0)) throw InvalidArgument("model size must be non-negative");
  const double plain = std::log2(1.0 / target_fpr);
  double ratio = divergence_bits / plain;
  if (model_size_bits > 0.0) {
    ratio -= model_size_bits / (c.value() * static_cast<double>(n_keys) * plain);
  }
  return ratio;
}

SolveReport solve_relaxed(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                          const SpaceModel& model) {
  require_target(target_fpr);
  require_regions(k, hist.segments());
  return solve_relaxed(hist, DivergenceTable(hist, k), target_fpr, k, model);
}

SolveReport solve_relaxed(const ScoreHistogram& hist, const DivergenceTable& table,
                          double target_fpr, std::uint32_t k, const SpaceModel& model) {
  require_target(target_fpr);
  require_regions(k, hist.segments());
  if (table.segments() != hist.segments() || k > table.max_regions()) {
    throw InvalidArgument("divergence table does not cover the requested partition");
  }
  PartitionPlan plan;
  plan.segments = hist.segments();
  plan.target_fpr = target_fpr;
  plan.boundaries = table.boundaries(hist.segments(), k);
  const RegionMasses masses = region_masses(hist, plan.boundaries);
  plan.fprs = optimal_fprs(masses.keys, masses.nonkeys, target_fpr);
  return make_report(std::move(plan), masses, table.max_divergence(hist.segments(), k), model);
}

SolveReport solve_general(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                          const SpaceModel& model) {
  require_target(target_fpr);
  require_regions(k, hist.segments());
  if (k < 2) throw InvalidArgument("solve_general needs at least two regions");
  return solve_general(hist, DivergenceTable(hist, k - 1), target_fpr, k, model);
}

SolveReport solve_general(const ScoreHistogram& hist, const DivergenceTable& table,
                          double target_fpr, std::uint32_t k, const SpaceModel& model) {
  require_target(target_fpr);
  require_regions(k, hist.segments());
  if (k < 2) throw InvalidArgument("solve_general needs at least two regions");
  if (table.segments() != hist.segments() || k - 1 > table.max_regions()) {
    throw InvalidArgument("divergence table does not cover the requested partition");
  }
  const std::uint32_t n = hist.segments();

  double best_objective = std::numeric_limits<double>::infinity();
  double best_divergence = 0.0;
  bool best_capped = false;
  std::vector<std::uint32_t> best_boundaries;
  std::vector<double> best_fprs;
  RegionMasses best_masses;

  for (std::uint32_t last_start = k - 1; last_start <= n - 1; ++last_start) {
    std::vector<std::uint32_t> boundaries = table.boundaries(last_start, k - 1);
    boundaries.push_back(n);
    RegionMasses masses = region_masses(hist, boundaries);
    std::vector<double> fprs = optimal_fprs(masses.keys, masses.nonkeys, target_fpr);

    // Same floating-point expression the relaxed DP maximizes at (N, k).
    const double divergence =
        table.max_divergence(last_start, k - 1) + table.region_term(last_start, n);

    double g_capped = 0.0;
    double h_capped = 0.0;
    double capped_divergence = 0.0;
    bool any_capped = false;
    for (std::size_t r = 0; r < fprs.size(); ++r) {
      if (fprs[r] >= 1.0) {
        any_capped = true;
        g_capped += masses.keys[r];
        h_capped += masses.nonkeys[r];
        capped_divergence += divergence_term(masses.keys[r], masses.nonkeys[r]);
      }
    }
    // Per-key backup bits / c: sum over uncapped regions of g_r log2(1/f_r).
    double objective;
    if (!any_capped) {
      objective = std::log2(1.0 / target_fpr) - divergence;
    } else {
      const double g_free = 1.0 - g_capped;
      const double f_free = target_fpr - h_capped;
      const double lead = g_free > 0.0 ? g_free * std::log2(g_free / f_free) : 0.0;
      objective = lead - (divergence - capped_divergence);
    }

    // Uncapped candidates compare by divergence directly so the choice
    // matches the relaxed DP bit for bit.
    const bool better = best_boundaries.empty() ||
                        (!any_capped && !best_capped ? divergence > best_divergence
                                                     : objective < best_objective);
    if (better) {
      best_objective = objective;
      best_capped = any_capped;
      best_divergence = divergence;
      best_boundaries = std::move(boundaries);
      best_fprs = std::move(fprs);
      best_masses = std::move(masses);
    }
  }

  PartitionPlan plan;
  plan.segments = n;
  plan.target_fpr = target_fpr;
  plan.boundaries = std::move(best_boundaries);
  plan.fprs = std::move(best_fprs);
  return make_report(std::move(plan), best_masses, best_divergence, model);
}

SolveReport solve(const ScoreHistogram& hist, double target_fpr, std::uint32_t k,
                  const SpaceModel& model) {
  return k == 1 ? solve_relaxed(hist, target_fpr, k, model)
                : solve_general(hist, target_fpr, k, model);
}

}  // namespace plbf
