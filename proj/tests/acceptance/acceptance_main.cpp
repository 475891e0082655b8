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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.
//
//   plbf_acceptance                 all criteria
//   plbf_acceptance --criterion 5   a single criterion

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "plbf/errors.hpp"
#include "plbf/experiment.hpp"
#include "plbf/optimizer.hpp"
#include "plbf/plbf_filter.hpp"
#include "plbf/score_space.hpp"
#include "support/oracles.hpp"

namespace plbf {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

const VariantConstant kStd = VariantConstant::standard();

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

std::vector<ScoreRecord> zipf_records(double skew, std::uint64_t n_keys, std::uint64_t n_nonkeys,
                                      std::uint32_t segments, std::uint64_t seed) {
  const ScorePair p = zipf_scores({skew, n_keys, n_nonkeys, seed}, segments);
  std::vector<ScoreRecord> out;
  out.reserve(n_keys + n_nonkeys);
  for (std::size_t i = 0; i < p.keys.scores.size(); ++i) {
    out.push_back({"k" + std::to_string(i), p.keys.scores[i], Label::kKey});
  }
  for (std::size_t i = 0; i < p.nonkeys.scores.size(); ++i) {
    out.push_back({"n" + std::to_string(i), p.nonkeys.scores[i], Label::kNonKey});
  }
  return out;
}

// Skewed synthetic dataset: 10^5 keys, 10^5 non-keys (40% for estimation).
Dataset synthetic_dataset(double skew) {
  return prepare_dataset(zipf_records(skew, 100000, 100000, 1000, 42), kDefaultEstimationFraction,
                         42);
}

ExperimentConfig reference_config() {
  ExperimentConfig config;
  config.segments = 1000;
  config.regions = 5;
  config.c = VariantConstant::optimal();
  return config;
}

PartitionPlan random_plan(std::mt19937_64& rng, std::uint32_t max_segments, std::uint32_t max_regions,
                          double accept_all_share) {
  PartitionPlan plan;
  plan.segments = 1 + static_cast<std::uint32_t>(rng() % max_segments);
  const std::uint32_t k = 1 + static_cast<std::uint32_t>(rng() % std::min(plan.segments, max_regions));
  std::vector<std::uint32_t> cuts(plan.segments - 1);
  std::iota(cuts.begin(), cuts.end(), 1u);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(k - 1);
  std::sort(cuts.begin(), cuts.end());
  plan.boundaries.push_back(0);
  plan.boundaries.insert(plan.boundaries.end(), cuts.begin(), cuts.end());
  plan.boundaries.push_back(plan.segments);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint32_t i = 0; i < k; ++i) {
    plan.fprs.push_back(u(rng) < accept_all_share ? 1.0 : std::pow(10.0, -0.05 - 4.0 * u(rng)));
  }
  plan.target_fpr = 0.01;
  return plan;
}

std::vector<ScoredElement> random_keys(std::mt19937_64& rng, std::size_t n, const char* prefix) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredElement> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Every 50th key sits exactly on a multiple of 1/1000.
    const double s = i % 50 == 0 ? static_cast<double>(rng() % 1001) / 1000.0 : u(rng);
    keys.push_back({prefix + std::to_string(i), s});
  }
  return keys;
}

// 1 ---------------------------------------------------------------------------
Outcome no_false_negatives() {
  std::mt19937_64 rng(1001);
  const auto keys = random_keys(rng, 100000, "key-");
  std::uint64_t missed = 0;
  std::uint64_t checked = 0;
  for (int t = 0; t < 200; ++t) {
    const PartitionPlan plan = random_plan(rng, 1000, 12, 0.15);
    const PlbfFilter filter = PlbfFilter::build(keys, plan, kStd, rng());
    for (const ScoredElement& k : keys) missed += filter.query(k.element, k.score) ? 0 : 1;
    checked += keys.size();
  }
  return {missed == 0, fmt("200 plans x 10^5 keys, %llu of %llu lookups missed",
                           static_cast<unsigned long long>(missed),
                           static_cast<unsigned long long>(checked))};
}

// 2 ---------------------------------------------------------------------------
Outcome dp_matches_enumeration() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_value = 0.0;
  double worst_boundaries = 0.0;
  int cases = 0;
  for (int t = 0; t < 500; ++t) {
    const auto n = static_cast<std::uint32_t>(1 + rng() % 12);
    const auto k = static_cast<std::uint32_t>(1 + rng() % std::min(n, 4u));
    ScoreSample keys{{}, Label::kKey};
    ScoreSample nonkeys{{}, Label::kNonKey};
    const double kp = 0.2 + 3.0 * u(rng);
    const double np = 0.2 + 3.0 * u(rng);
    for (std::uint64_t i = 0, m = 1 + rng() % 60; i < m; ++i) keys.scores.push_back(std::pow(u(rng), kp));
    for (std::uint64_t i = 0, m = 1 + rng() % 60; i < m; ++i) nonkeys.scores.push_back(std::pow(u(rng), np));
    const ScoreHistogram hist = build_histogram(keys, nonkeys, n);
    const std::vector<double> g(hist.key_mass().begin(), hist.key_mass().end());
    const std::vector<double> h(hist.nonkey_mass().begin(), hist.nonkey_mass().end());
    const auto oracle = testing::brute_force_max_divergence(g, h, k);
    const DivergenceTable table(hist, k);
    worst_value = std::max(worst_value, std::abs(table.max_divergence(n, k) - oracle.divergence));
    worst_boundaries = std::max(
        worst_boundaries,
        std::abs(testing::reference_divergence(g, h, table.boundaries(n, k)) - oracle.divergence));
    ++cases;
  }
  const bool pass = worst_value <= 1e-12 && worst_boundaries <= 1e-12;
  return {pass, fmt("%d histograms, max |DP - brute| = %.3g, boundary gap %.3g", cases, worst_value,
                    worst_boundaries)};
}

// 3 ---------------------------------------------------------------------------
Outcome rate_assignment_optimal() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_constraint = 0.0;
  double worst_excess = -INFINITY;
  bool in_range = true;
  for (int t = 0; t < 100; ++t) {
    const auto g = testing::random_masses(rng, 3);
    const auto h = testing::random_masses(rng, 3);
    const double target = std::pow(10.0, -0.3 - 2.7 * u(rng));
    const auto f = optimal_fprs(g, h, target);
    double load = 0.0;
    for (int i = 0; i < 3; ++i) {
      in_range = in_range && f[i] > 0.0 && f[i] <= 1.0;
      load += h[i] * f[i];
    }
    worst_constraint = std::max(worst_constraint, std::abs(load - target));
    const double grid = testing::grid_min_objective3(g, h, target, 200, 1e-7);
    worst_excess = std::max(worst_excess, testing::rate_objective(g, f) - grid);
  }
  const auto clamp = optimal_fprs(std::vector<double>{0.1, 0.9}, std::vector<double>{0.9, 0.1}, 0.2);
  const bool clamp_ok = std::abs(clamp[0] - 1.0 / 9.0) <= 1e-12 && clamp[1] == 1.0;
  const bool pass = in_range && worst_constraint <= 1e-9 && worst_excess <= 1e-6 && clamp_ok;
  return {pass, fmt("100 instances, max |sum h f - F| = %.3g, objective - grid min <= %.3g, "
                    "clamp example f = [%.10f, %.1f]",
                    worst_constraint, worst_excess, clamp[0], clamp[1])};
}

// 4 ---------------------------------------------------------------------------
Outcome bloom_fpr_formula() {
  const double got = theoretical_fpr(1000, 100, 7);
  const double ref = testing::reference_fpr(1000, 100, 7);
  const bool pass = std::abs(got - 0.00822) <= 1e-5 && std::abs(got - ref) <= 1e-12;
  return {pass, fmt("theoretical_fpr(1000,100,7) = %.13f, 50-digit reference %.13f", got, ref)};
}

// 5 and 6 share one build.
const BuildResult& reference_build() {
  static const BuildResult result = build_plbf(synthetic_dataset(1.5), 0.001, reference_config());
  return result;
}

Outcome space_matches_divergence() {
  const BuildResult& r = reference_build();
  const double n = static_cast<double>(r.report.n_keys);
  const double c = r.report.c;
  const double d = r.report.divergence_bits;
  const double predicted = n * c * (std::log2(1.0 / 0.001) - d);
  const double realized = static_cast<double>(r.accounted_bits);
  const double rel = std::abs(realized - predicted) / predicted;
  int capped = 0;
  for (double f : r.report.plan.fprs) capped += f >= 1.0 ? 1 : 0;

  // Same data at a target low enough that no region is capped.
  constexpr double kControlF = 1e-6;
  const BuildResult control = build_plbf(synthetic_dataset(1.5), kControlF, reference_config());
  const double control_predicted =
      n * c * (std::log2(1.0 / kControlF) - control.report.divergence_bits);
  const double control_rel =
      std::abs(static_cast<double>(control.accounted_bits) - control_predicted) / control_predicted;
  return {rel <= 0.05, fmt("realized %.0f bits vs n c (log2(1/F) - D) = %.0f (D = %.4f), "
                           "relative gap %.1f%%, %d region(s) at f = 1; uncapped control at "
                           "F = 1e-6: gap %.3f%%",
                           realized, predicted, d, 100.0 * rel, capped, 100.0 * control_rel)};
}

Outcome measured_fpr_bound() {
  const BuildResult& r = reference_build();
  constexpr double kF = 0.001;
  const double m = static_cast<double>(r.heldout.queries);
  const double bound = kF + 3.0 * std::sqrt(kF * (1.0 - kF) / m) + 0.2 * kF;
  const bool pass = m >= 6e4 && r.heldout.rate <= bound;
  return {pass, fmt("M = %.0f held-out non-keys, measured %.6f (95%% CI %.6f..%.6f), bound %.6f", m,
                    r.heldout.rate, r.heldout.ci_low, r.heldout.ci_high, bound)};
}

// 7 ---------------------------------------------------------------------------
Outcome monotone_in_regions() {
  std::vector<ScoreHistogram> hists;
  const Dataset data = synthetic_dataset(1.5);
  hists.push_back(dataset_histogram(data, 1000));
  for (double skew : {0.5, 1.0, 2.0}) {
    const ScorePair p = zipf_scores({skew, 50000, 20000, 7}, 1000);
    hists.push_back(build_histogram(p.keys, p.nonkeys, 1000));
  }
  std::mt19937_64 rng(1007);
  for (int t = 0; t < 20; ++t) {
    hists.push_back(ScoreHistogram::from_masses(testing::random_masses(rng, 100, 0.0),
                                                testing::random_masses(rng, 100)));
  }
  int violations = 0;
  for (const ScoreHistogram& h : hists) {
    const DivergenceTable table(h, 25);
    for (std::uint32_t k = 1; k < 25; ++k) {
      if (table.max_divergence(h.segments(), k + 1) < table.max_divergence(h.segments(), k)) {
        ++violations;
      }
    }
  }
  std::vector<std::uint32_t> ks(25);
  std::iota(ks.begin(), ks.end(), 1u);
  const auto rows = run_regions_sweep(data, 0.001, ks, reference_config());
  const double saved5 = rows[4].saved_bits;
  const double saved25 = rows[24].saved_bits;
  const bool pass = violations == 0 && saved5 >= 0.9 * saved25;
  return {pass, fmt("%zu histograms, %d decreasing steps; saved(k=5) = %.0f, saved(k=25) = %.0f, "
                    "ratio %.3f",
                    hists.size(), violations, saved5, saved25, saved5 / saved25)};
}

// 8 ---------------------------------------------------------------------------
Outcome beats_sandwich() {
  std::ostringstream detail;
  bool pass = true;
  for (double skew : {1.5, 2.0}) {
    const Dataset data = synthetic_dataset(skew);
    const std::vector<double> fprs = {0.001};
    const std::vector<Method> methods = {Method::kPlbf, Method::kSandwich2Region};
    const SweepReport report = run_sweep(data, fprs, methods, reference_config());
    const SweepRow& plbf = report.rows[0];
    const SweepRow& sandwich = report.rows[1];
    const double ratio = sandwich.total_bits / plbf.total_bits;
    pass = pass && plbf.error.empty() && sandwich.error.empty() &&
           plbf.total_bits < sandwich.total_bits && ratio >= 1.5;
    detail << (skew == 1.5 ? "" : "; ") << "skew " << skew << ": plbf " << plbf.total_bits
           << " bits, sandwich " << sandwich.total_bits << " bits, ratio "
           << fmt("%.2f", ratio);
  }
  return {pass, detail.str()};
}

// 9 ---------------------------------------------------------------------------
Outcome sandwich_identity() {
  std::mt19937_64 rng(1009);
  double worst_rate = 0.0;
  double worst_budget_excess = -INFINITY;
  bool recall = true;
  for (int t = 0; t < 100; ++t) {
    const PartitionPlan plan = random_plan(rng, 1000, 10, 0.0);
    const auto keys = random_keys(rng, 2000, "s-");
    const PlbfFilter filter = PlbfFilter::build(keys, plan, kStd, rng());
    const SandwichPlan s = sandwich_transform(filter, keys, rng());
    std::vector<double> counts;
    for (const BloomFilter& b : filter.backups()) counts.push_back(static_cast<double>(b.inserted()));
    for (std::size_t i = 0; i < plan.fprs.size(); ++i) {
      worst_rate = std::max(worst_rate, std::abs(s.prefilter_fpr * s.inner_fprs[i] - plan.fprs[i]));
    }
    const BitBudget b = sandwich_bit_budget(counts, plan.fprs, kStd);
    const double gap = std::abs(static_cast<double>(b.partitioned) - static_cast<double>(b.sandwiched));
    worst_budget_excess = std::max(worst_budget_excess, gap - static_cast<double>(plan.regions()));
    for (const ScoredElement& k : keys) recall = recall && s.query(k.element, k.score);
  }
  const bool pass = worst_rate <= 1e-12 && worst_budget_excess <= 0.0 && recall;
  return {pass, fmt("100 plans, max |f0 f_inner - f| = %.3g, budget gap minus k <= %.0f bits, "
                    "recall %s",
                    worst_rate, worst_budget_excess, recall ? "complete" : "INCOMPLETE")};
}

// 10 --------------------------------------------------------------------------
Outcome serialization_round_trip() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int fixpoint_failures = 0;
  std::uint64_t answer_mismatches = 0;
  std::uint64_t undetected = 0;
  std::uint64_t corruptions = 0;
  for (int t = 0; t < 100; ++t) {
    const PartitionPlan plan = random_plan(rng, 200, 6, 0.2);
    const auto keys = random_keys(rng, rng() % 500, "r-");
    const PlbfFilter filter = PlbfFilter::build(keys, plan, VariantConstant(1.0 + u(rng)), rng());
    const auto bytes = serialize(filter);
    const PlbfFilter back = deserialize(bytes);
    if (serialize(back) != bytes) ++fixpoint_failures;
    for (int q = 0; q < 10000; ++q) {
      const std::string e = "probe-" + std::to_string(rng());
      const double s = u(rng);
      if (filter.query(e, s) != back.query(e, s)) ++answer_mismatches;
    }
    auto bad = bytes;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
      const auto flip = static_cast<std::uint8_t>(1 + rng() % 255);
      bad[i] ^= flip;
      ++corruptions;
      try {
        deserialize(bad);
        ++undetected;
      } catch (const FormatError&) {
      }
      bad[i] ^= flip;
    }
  }
  const bool pass = fixpoint_failures == 0 && answer_mismatches == 0 && undetected == 0;
  return {pass, fmt("100 filters, %d non-identical re-serializations, %llu answer mismatches over "
                    "10^6 probes, %llu of %llu single-byte corruptions undetected",
                    fixpoint_failures, static_cast<unsigned long long>(answer_mismatches),
                    static_cast<unsigned long long>(undetected),
                    static_cast<unsigned long long>(corruptions))};
}

// 11 --------------------------------------------------------------------------
Outcome relaxed_equals_general() {
  std::mt19937_64 rng(1011);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int compared = 0;
  int mismatches = 0;
  const auto check = [&](const ScoreHistogram& h, double target, std::uint32_t k) {
    const SpaceModel model{100000, VariantConstant::optimal(), 0.0};
    const SolveReport relaxed = solve_relaxed(h, target, k, model);
    for (double f : relaxed.plan.fprs) {
      if (f >= 1.0) return;
    }
    const SolveReport general = solve_general(h, target, k, model);
    ++compared;
    if (!(general.plan == relaxed.plan) || general.backup_bits != relaxed.backup_bits ||
        general.divergence_bits != relaxed.divergence_bits) {
      ++mismatches;
    }
  };
  for (int t = 0; t < 400 && compared < 200; ++t) {
    const auto k = static_cast<std::uint32_t>(2 + rng() % 7);
    const auto n = static_cast<std::uint32_t>(k + rng() % 150);
    const ScoreHistogram h = ScoreHistogram::from_masses(testing::random_masses(rng, n, 0.0),
                                                         testing::random_masses(rng, n));
    check(h, std::pow(10.0, -2.0 - 4.0 * u(rng)), k);
  }
  const Dataset data = synthetic_dataset(1.5);
  const ScoreHistogram zipf = dataset_histogram(data, 1000);
  for (double target : {1e-6, 1e-7, 1e-8}) check(zipf, target, 5);
  const bool pass = compared >= 100 && mismatches == 0;
  return {pass, fmt("%d uncapped instances compared, %d differ", compared, mismatches)};
}

std::vector<Criterion> criteria() {
  return {
      {1, "no false negatives", 30, no_false_negatives},
      {2, "divergence DP equals exhaustive enumeration", 10, dp_matches_enumeration},
      {3, "rate assignment optimal on grid", 60, rate_assignment_optimal},
      {4, "Bloom false positive formula", 0, bloom_fpr_formula},
      {5, "backup space equals n c (log2(1/F) - D)", 60, space_matches_divergence},
      {6, "held-out false positive rate within bound", 60, measured_fpr_bound},
      {7, "divergence monotone in k, plateau by k = 5", 0, monotone_in_regions},
      {8, "PLBF beats two-region sandwich", 0, beats_sandwich},
      {9, "sandwich transform identity", 0, sandwich_identity},
      {10, "serialization round trip and corruption detection", 0, serialization_round_trip},
      {11, "relaxed and general solvers agree when uncapped", 0, relaxed_equals_general},
  };
}

int usage() {
  std::fprintf(stderr, "usage: plbf_acceptance [--criterion N]\n");
  return 2;
}

}  // namespace
}  // namespace plbf

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      return plbf::usage();
    }
  }
  bool all_pass = true;
  bool ran = false;
  for (const plbf::Criterion& c : plbf::criteria()) {
    if (only != 0 && c.id != only) continue;
    ran = true;
    const auto start = plbf::Clock::now();
    plbf::Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(plbf::Clock::now() - start).count();
    if (c.budget_seconds > 0 && seconds > c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += plbf::fmt("; exceeded %.0f s budget", c.budget_seconds);
    }
    all_pass = all_pass && outcome.pass;
    std::printf("criterion %2d %s  %s: %s (%.2f s)\n", c.id, outcome.pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  if (!ran) return plbf::usage();
  return all_pass ? 0 : 1;
}
