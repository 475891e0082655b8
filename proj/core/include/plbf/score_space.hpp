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
#include <span>
#include <utility>
#include <vector>

namespace plbf {

enum class Label { kKey, kNonKey };

struct ScoreSample {
  std::vector<double> scores;  // each in [0,1]
  Label label = Label::kKey;
};

// Score space [0,1] is cut into N equal-width segments. Segment j (1-based)
// covers ((j-1)/N, j/N]; segment 1 also owns 0. The boundary test is
// `score <= double(j) / N`, so a score of exactly j/N lands in segment j.
//
// Throws InvalidArgument for scores outside [0,1] (or NaN) and N == 0.
std::uint32_t segment_of(double score, std::uint32_t n_segments);

// Discretized key density g' and non-key query density h'.
class ScoreHistogram {
 public:
  // Direct construction from (unnormalized) per-segment masses. Both arrays
  // are normalized to sum 1. Throws unless sizes match, N >= 1, every g >= 0
  // with positive total, and every h > 0.
  static ScoreHistogram from_masses(std::vector<double> key_mass, std::vector<double> nonkey_mass);

  std::uint32_t segments() const noexcept { return static_cast<std::uint32_t>(g_.size()); }
  std::span<const double> key_mass() const noexcept { return g_; }
  std::span<const double> nonkey_mass() const noexcept { return h_; }
  // Non-key frequencies before smoothing; equals nonkey_mass() for from_masses().
  std::span<const double> raw_nonkey_mass() const noexcept { return h_raw_; }
  std::uint64_t key_count() const noexcept { return key_count_; }
  std::uint64_t nonkey_count() const noexcept { return nonkey_count_; }

 private:
  friend ScoreHistogram build_histogram(const ScoreSample&, const ScoreSample&, std::uint32_t,
                                        double);

  std::vector<double> g_;
  std::vector<double> h_;
  std::vector<double> h_raw_;
  std::uint64_t key_count_ = 0;
  std::uint64_t nonkey_count_ = 0;
};

constexpr double kDefaultSmoothing = 1.0;

// g'[j] = (#keys in segment j) / #keys. Non-key masses get additive (Laplace)
// smoothing, h'[j] = (count_j + alpha) / (total + alpha * N), so every
// non-key segment is strictly positive.
ScoreHistogram build_histogram(const ScoreSample& keys, const ScoreSample& nonkeys,
                               std::uint32_t n_segments, double smoothing = kDefaultSmoothing);

struct ZipfConfig {
  double skew = 1.0;
  std::uint64_t n_keys = 1;
  std::uint64_t n_nonkeys = 1;
  std::uint64_t seed = 42;
};

struct ScorePair {
  ScoreSample keys;
  ScoreSample nonkeys;
};

// p(rank) proportional to rank^-skew for rank = 1..n; index r-1 holds rank r.
std::vector<double> zipf_probabilities(double skew, std::uint32_t n);

// Synthetic model scores. Keys pick a segment with Zipf rank 1 at the top
// segment; non-keys mirror that with rank 1 at the bottom. Within a segment
// the score is uniform. Deterministic for a given config.
ScorePair zipf_scores(const ZipfConfig& config, std::uint32_t n_segments);

struct IndexSplit {
  std::vector<std::size_t> estimation;  // floor(fraction * size) indices
  std::vector<std::size_t> evaluation;
};

// Seeded random partition of [0, size). Throws unless 0 < fraction < 1.
IndexSplit split_indices(std::size_t size, double fraction, std::uint64_t seed);

std::pair<ScoreSample, ScoreSample> split_sample(const ScoreSample& sample, double fraction,
                                                 std::uint64_t seed);

constexpr double kDefaultEstimationFraction = 0.4;

}  // namespace plbf
