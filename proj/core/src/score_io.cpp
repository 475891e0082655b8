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

#include "plbf/score_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "plbf/errors.hpp"

namespace plbf {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

double parse_score(std::string_view text, const std::string& source, std::size_t line) {
  double s = 0.0;
  if (!parse_double(text, s)) {
    throw ParseError(source, line, "score is not a number: '" + std::string(text) + "'");
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw ParseError(source, line, "score outside [0,1]: " + std::string(trim(text)));
  }
  return s;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open score file '" + path.string() + "'");
  return in;
}

}  // namespace

std::string_view to_string(Label label) noexcept {
  return label == Label::kKey ? "key" : "nonkey";
}

std::vector<ScoreRecord> parse_score_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw ParseError(source, line_no, "empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (trim(line) != "id,score,label") {
    throw ParseError(source, line_no, "expected header 'id,score,label'");
  }

  std::vector<ScoreRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError(source, line_no, "expected 3 comma-separated fields");
    }
    ScoreRecord rec;
    rec.id = std::string(row.substr(0, c1));
    rec.score = parse_score(row.substr(c1 + 1, c2 - c1 - 1), source, line_no);
    const std::string_view label = trim(row.substr(c2 + 1));
    if (label == "key") {
      rec.label = Label::kKey;
    } else if (label == "nonkey") {
      rec.label = Label::kNonKey;
    } else {
      throw ParseError(source, line_no, "label must be 'key' or 'nonkey', got '" +
                                            std::string(label) + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ScoreRecord> parse_score_column(std::istream& in, Label label,
                                            const std::string& source) {
  std::vector<ScoreRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    double probe = 0.0;
    if (line_no == 1 && !parse_double(row, probe)) continue;  // header
    ScoreRecord rec;
    rec.score = parse_score(row, source, line_no);
    rec.label = label;
    rec.id = std::string(to_string(label)) + "-" + std::to_string(records.size());
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ScoreRecord> read_score_csv(const std::filesystem::path& path) {
  auto in = open(path);
  return parse_score_csv(in, path.string());
}

std::vector<ScoreRecord> read_score_column(const std::filesystem::path& path, Label label) {
  auto in = open(path);
  return parse_score_column(in, label, path.string());
}

void write_score_csv(std::ostream& out, std::span<const ScoreRecord> records) {
  out << "id,score,label\n";
  for (const ScoreRecord& rec : records) {
    out << rec.id << ',' << format_double(rec.score) << ',' << to_string(rec.label) << '\n';
  }
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::vector<ScoredElement> scored_elements(std::span<const ScoreRecord> records, Label label) {
  std::vector<ScoredElement> out;
  for (const ScoreRecord& rec : records) {
    if (rec.label == label) out.push_back({rec.id, rec.score});
  }
  return out;
}

ScoreSample score_sample(std::span<const ScoredElement> elements, Label label) {
  ScoreSample sample;
  sample.label = label;
  sample.scores.reserve(elements.size());
  for (const ScoredElement& e : elements) sample.scores.push_back(e.score);
  return sample;
}

}  // namespace plbf
