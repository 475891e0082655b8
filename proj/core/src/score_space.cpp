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

#include "plbf/score_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "plbf/errors.hpp"
#include "plbf/hash.hpp"
#include "plbf/random.hpp"

namespace plbf {
namespace {

double upper_edge(std::uint32_t j, std::uint32_t n) {
  return static_cast<double>(j) / static_cast<double>(n);
}

std::vector<double> count_segments(const ScoreSample& sample, std::uint32_t n) {
  std::vector<double> counts(n, 0.0);
  for (double s : sample.scores) counts[segment_of(s, n) - 1] += 1.0;
  return counts;
}

void normalize(std::vector<double>& v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  for (double& x : v) x /= total;
}

}  // namespace

std::uint32_t segment_of(double score, std::uint32_t n_segments) {
  if (n_segments == 0) throw InvalidArgument("segment count must be positive");
  if (!(score >= 0.0 && score <= 1.0)) {
    throw InvalidArgument("score must lie in [0,1], got " + std::to_string(score));
  }
  const double scaled = std::ceil(score * static_cast<double>(n_segments));
  std::uint32_t j = std::clamp<std::uint32_t>(static_cast<std::uint32_t>(scaled), 1, n_segments);
  // score * N can round across an edge; settle against the exact j/N test.
  while (j > 1 && score <= upper_edge(j - 1, n_segments)) --j;
  while (j < n_segments && score > upper_edge(j, n_segments)) ++j;
  return j;
}

ScoreHistogram ScoreHistogram::from_masses(std::vector<double> key_mass,
                                           std::vector<double> nonkey_mass) {
  if (key_mass.empty() || key_mass.size() != nonkey_mass.size()) {
    throw InvalidArgument("key and non-key masses must be non-empty and of equal length");
  }
  if (key_mass.size() > UINT32_MAX) throw InvalidArgument("too many segments");
  for (double g : key_mass) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("key masses must be >= 0");
  }
  for (double h : nonkey_mass) {
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("non-key masses must be > 0");
  }
  if (!(std::accumulate(key_mass.begin(), key_mass.end(), 0.0) > 0.0)) {
    throw InvalidArgument("key masses sum to zero");
  }
  normalize(key_mass);
  normalize(nonkey_mass);
  ScoreHistogram hist;
  hist.g_ = std::move(key_mass);
  hist.h_ = std::move(nonkey_mass);
  hist.h_raw_ = hist.h_;
  return hist;
}

ScoreHistogram build_histogram(const ScoreSample& keys, const ScoreSample& nonkeys,
                               std::uint32_t n_segments, double smoothing) {
  if (n_segments == 0) throw InvalidArgument("segment count must be positive");
  if (keys.scores.empty() || nonkeys.scores.empty()) {
    throw InvalidArgument("histogram needs non-empty key and non-key samples");
  }
  if (keys.label != Label::kKey || nonkeys.label != Label::kNonKey) {
    throw InvalidArgument("samples passed with swapped labels");
  }
  if (!(smoothing > 0.0) || !std::isfinite(smoothing)) {
    throw InvalidArgument("smoothing must be positive");
  }

  ScoreHistogram hist;
  hist.key_count_ = keys.scores.size();
  hist.nonkey_count_ = nonkeys.scores.size();

  hist.g_ = count_segments(keys, n_segments);
  for (double& g : hist.g_) g /= static_cast<double>(hist.key_count_);

  const std::vector<double> counts = count_segments(nonkeys, n_segments);
  const double total = static_cast<double>(hist.nonkey_count_);
  const double denom = total + smoothing * static_cast<double>(n_segments);
  hist.h_raw_.resize(n_segments);
  hist.h_.resize(n_segments);
  for (std::uint32_t j = 0; j < n_segments; ++j) {
    hist.h_raw_[j] = counts[j] / total;
    hist.h_[j] = (counts[j] + smoothing) / denom;
  }
  return hist;
}

std::vector<double> zipf_probabilities(double skew, std::uint32_t n) {
  if (!(skew > 0.0) || !std::isfinite(skew)) {
    throw InvalidArgument("zipf skew must be positive, got " + std::to_string(skew));
  }
  if (n == 0) throw InvalidArgument("segment count must be positive");
  std::vector<double> p(n);
  for (std::uint32_t r = 1; r <= n; ++r) p[r - 1] = std::pow(static_cast<double>(r), -skew);
  normalize(p);
  return p;
}

namespace {

std::vector<double> draw_scores(const std::vector<double>& cdf, std::uint64_t count, bool top_ranked,
                                std::uint32_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> scores;
  scores.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u = uniform01(rng) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto rank = static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(
                          it - cdf.begin(), static_cast<std::ptrdiff_t>(n) - 1)) + 1;
    const std::uint32_t segment = top_ranked ? n - rank + 1 : rank;
    // (segment - u) / N lies in ((segment-1)/N, segment/N].
    double s = (static_cast<double>(segment) - uniform01(rng)) / static_cast<double>(n);
    if (s > 1.0 || segment_of(s, n) != segment) s = upper_edge(segment, n);
    scores.push_back(s);
  }
  return scores;
}

}  // namespace

ScorePair zipf_scores(const ZipfConfig& config, std::uint32_t n_segments) {
  if (config.n_keys == 0 || config.n_nonkeys == 0) {
    throw InvalidArgument("zipf sample sizes must be >= 1");
  }
  const std::vector<double> p = zipf_probabilities(config.skew, n_segments);
  std::vector<double> cdf(p.size());
  std::partial_sum(p.begin(), p.end(), cdf.begin());

  ScorePair out;
  out.keys.label = Label::kKey;
  out.nonkeys.label = Label::kNonKey;
  out.keys.scores = draw_scores(cdf, config.n_keys, true, n_segments, derive_seed(config.seed, 1));
  out.nonkeys.scores =
      draw_scores(cdf, config.n_nonkeys, false, n_segments, derive_seed(config.seed, 2));
  return out;
}

IndexSplit split_indices(std::size_t size, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0,1), got " + std::to_string(fraction));
  }
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = size; i > 1; --i) {
    std::swap(order[i - 1], order[uniform_below(rng, i)]);
  }
  const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(size)));
  IndexSplit split;
  split.estimation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  split.evaluation.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  return split;
}

std::pair<ScoreSample, ScoreSample> split_sample(const ScoreSample& sample, double fraction,
                                                 std::uint64_t seed) {
  const IndexSplit split = split_indices(sample.scores.size(), fraction, seed);
  std::pair<ScoreSample, ScoreSample> out;
  out.first.label = out.second.label = sample.label;
  out.first.scores.reserve(split.estimation.size());
  out.second.scores.reserve(split.evaluation.size());
  for (std::size_t i : split.estimation) out.first.scores.push_back(sample.scores[i]);
  for (std::size_t i : split.evaluation) out.second.scores.push_back(sample.scores[i]);
  return out;
}

}  // namespace plbf
