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

// Score files: UTF-8 CSV with header `id,score,label`, label in {key, nonkey}.
// Single-column files hold one score per line (an optional non-numeric header
// line is skipped); their ids are synthesized as "<label>-<row>".

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plbf/plbf_filter.hpp"
#include "plbf/score_space.hpp"

namespace plbf {

struct ScoreRecord {
  std::string id;
  double score = 0.0;
  Label label = Label::kKey;
};

std::string_view to_string(Label label) noexcept;

// Throws ParseError on a bad header, field count, score or label.
std::vector<ScoreRecord> parse_score_csv(std::istream& in, const std::string& source);
std::vector<ScoreRecord> parse_score_column(std::istream& in, Label label,
                                            const std::string& source);

// Throw IoError if the file cannot be opened, ParseError on bad content.
std::vector<ScoreRecord> read_score_csv(const std::filesystem::path& path);
std::vector<ScoreRecord> read_score_column(const std::filesystem::path& path, Label label);

void write_score_csv(std::ostream& out, std::span<const ScoreRecord> records);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Records with the given label, as (id, score) pairs / bare score samples.
std::vector<ScoredElement> scored_elements(std::span<const ScoreRecord> records, Label label);
ScoreSample score_sample(std::span<const ScoredElement> elements, Label label);

}  // namespace plbf
