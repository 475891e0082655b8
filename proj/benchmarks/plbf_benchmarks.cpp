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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "plbf/bloom_filter.hpp"
#include "plbf/optimizer.hpp"
#include "plbf/plbf_filter.hpp"
#include "plbf/score_space.hpp"

namespace {

using plbf::BloomFilter;
using plbf::VariantConstant;

std::vector<std::string> make_keys(std::size_t n, const char* prefix) {
  std::vector<std::string> keys;
  keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) keys.push_back(prefix + std::to_string(i));
  return keys;
}

plbf::ScoreHistogram zipf_histogram(std::uint32_t segments) {
  const plbf::ZipfConfig config{1.5, 100000, 40000, 42};
  const plbf::ScorePair pair = plbf::zipf_scores(config, segments);
  return plbf::build_histogram(pair.keys, pair.nonkeys, segments);
}

void BM_BloomInsert(benchmark::State& state) {
  const auto keys = make_keys(static_cast<std::size_t>(state.range(0)), "key");
  for (auto _ : state) {
    BloomFilter filter =
        BloomFilter::for_capacity(keys.size(), 0.01, VariantConstant::standard(), 7);
    for (const auto& k : keys) filter.insert(k);
    benchmark::DoNotOptimize(filter.popcount());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BloomInsert)->Arg(1 << 12)->Arg(1 << 16);

void BM_BloomContains(benchmark::State& state) {
  const auto keys = make_keys(1 << 16, "key");
  const auto probes = make_keys(1 << 16, "probe");
  BloomFilter filter = BloomFilter::for_capacity(keys.size(), 0.01, VariantConstant::standard(), 7);
  for (const auto& k : keys) filter.insert(k);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(filter.contains(probes[i++ & 0xFFFF]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BloomContains);

void BM_DivergenceTable(benchmark::State& state) {
  const auto hist = zipf_histogram(static_cast<std::uint32_t>(state.range(0)));
  for (auto _ : state) {
    plbf::DivergenceTable table(hist, static_cast<std::uint32_t>(state.range(1)));
    benchmark::DoNotOptimize(table.max_divergence(hist.segments(), 1));
  }
}
BENCHMARK(BM_DivergenceTable)->Args({1000, 4})->Args({1000, 24})->Unit(benchmark::kMillisecond);

void BM_SolveGeneral(benchmark::State& state) {
  const auto hist = zipf_histogram(1000);
  const plbf::SpaceModel model{100000, VariantConstant::optimal(), 0.0};
  const auto k = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(plbf::solve_general(hist, 0.001, k, model).backup_bits);
  }
}
BENCHMARK(BM_SolveGeneral)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_PlbfQuery(benchmark::State& state) {
  const plbf::ZipfConfig config{1.5, 100000, 65536, 42};
  const plbf::ScorePair pair = plbf::zipf_scores(config, 1000);
  const auto hist = plbf::build_histogram(pair.keys, pair.nonkeys, 1000);
  const plbf::SpaceModel model{config.n_keys, VariantConstant::optimal(), 0.0};
  const auto report = plbf::solve(hist, 0.001, 5, model);

  std::vector<plbf::ScoredElement> keys;
  for (std::size_t i = 0; i < pair.keys.scores.size(); ++i) {
    keys.push_back({"k" + std::to_string(i), pair.keys.scores[i]});
  }
  const auto filter = plbf::PlbfFilter::build(keys, report.plan, VariantConstant::standard(), 1);
  const auto probes = make_keys(1 << 16, "n");
  std::size_t i = 0;
  for (auto _ : state) {
    const std::size_t j = i++ & 0xFFFF;
    benchmark::DoNotOptimize(filter.query(probes[j], pair.nonkeys.scores[j]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PlbfQuery);

}  // namespace

BENCHMARK_MAIN();
