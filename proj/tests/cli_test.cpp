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

#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "plbf/bloom_filter.hpp"
#include "plbf/plbf_filter.hpp"

namespace plbf::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("plbf_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    const Result r = run_cli({"synth", "--n-keys", "20000", "--n-nonkeys", "20000", "--out",
                              path("scores.csv")});
    ASSERT_EQ(r.code, kOk) << r.err;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string path(const std::string& name) { return (dir_ / name).string(); }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST_F(CliTest, SynthIsDeterministicWithExpectedRows) {
  const Result a = run_cli({"synth", "--n-keys", "300", "--n-nonkeys", "200", "--seed", "7"});
  const Result b = run_cli({"synth", "--n-keys", "300", "--n-nonkeys", "200", "--seed", "7"});
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 501);
  EXPECT_EQ(a.out.substr(0, 15), "id,score,label\n");
  const Result c = run_cli({"synth", "--n-keys", "300", "--n-nonkeys", "200", "--seed", "8"});
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, SynthFullScaleRowCount) {
  const std::string text = slurp(path("scores.csv"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 40001);
  const Result big = run_cli({"synth", "--out", path("big.csv")});
  ASSERT_EQ(big.code, kOk);
  const std::string b = slurp(path("big.csv"));
  EXPECT_EQ(std::count(b.begin(), b.end(), '\n'), 200001);
  EXPECT_NE(big.out.find("divergence_bits="), std::string::npos);
}

TEST_F(CliTest, BuildQueryRoundTrip) {
  const Result b = run_cli({"build", "--scores", path("scores.csv"), "--fpr", "0.01",
                            "--filter-out", path("f.plbf")});
  ASSERT_EQ(b.code, kOk) << b.err;
  const auto report = nlohmann::json::parse(b.out);
  EXPECT_EQ(report["plan"]["segments"], 1000);
  EXPECT_EQ(report["plan"]["fprs"].size(), 5u);
  const double predicted = report["predicted_bits"];
  const double realized = report["realized_bits"];
  EXPECT_LE(std::abs(realized - predicted), 0.05 * predicted);

  // First data row of the score file is key k0.
  const std::string text = slurp(path("scores.csv"));
  const auto line_end = text.find('\n', 15);
  const std::string row = text.substr(15, line_end - 15);
  const std::string score = row.substr(row.find(',') + 1, row.rfind(',') - row.find(',') - 1);
  const Result q = run_cli({"query", "--filter", path("f.plbf"), "--element", "k0", "--score", score});
  EXPECT_EQ(q.code, kOk);
  EXPECT_EQ(q.out, "positive\n");
}

TEST_F(CliTest, QueryNegativeAndErrors) {
  ASSERT_EQ(run_cli({"build", "--scores", path("scores.csv"), "--fpr", "0.001", "--filter-out",
                     path("g.plbf")}).code,
            kOk);
  const Result neg = run_cli({"query", "--filter", path("g.plbf"), "--element", "absent", "--score",
                              "0.0"});
  EXPECT_EQ(neg.code, kNegative);
  EXPECT_EQ(neg.out, "negative\n");
  EXPECT_EQ(run_cli({"query", "--filter", path("g.plbf"), "--element", "x", "--score", "1.5"}).code,
            kUsage);
  EXPECT_EQ(run_cli({"query", "--filter", path("missing.plbf"), "--element", "x", "--score", "0.5"})
                .code,
            kIo);
  std::ofstream(path("junk.plbf")) << "not a filter";
  EXPECT_EQ(run_cli({"query", "--filter", path("junk.plbf"), "--element", "x", "--score", "0.5"})
                .code,
            kUsage);
}

TEST_F(CliTest, AcceptAllRegionAnswersPositive) {
  const PartitionPlan plan{10, {0, 5, 10}, {0.01, 1.0}, 0.01};
  const PlbfFilter f = PlbfFilter::build({}, plan, VariantConstant::optimal(), 1);
  const auto bytes = serialize(f);
  std::ofstream(path("accept.plbf"), std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  const Result q = run_cli({"query", "--filter", path("accept.plbf"), "--element", "anything",
                            "--score", "0.9"});
  EXPECT_EQ(q.code, kOk);
  EXPECT_EQ(q.out, "positive\n");
}

TEST_F(CliTest, SingleRegionBuildMatchesPlainSize) {
  const Result b = run_cli({"build", "--scores", path("scores.csv"), "--fpr", "0.01", "--regions",
                            "1", "--filter-out", path("one.plbf")});
  ASSERT_EQ(b.code, kOk) << b.err;
  const auto report = nlohmann::json::parse(b.out);
  EXPECT_EQ(report["realized_bits"].get<std::uint64_t>(),
            size_for_fpr(20000, 0.01, VariantConstant::optimal()));
}

TEST_F(CliTest, SeparateColumnFiles) {
  std::ofstream(path("k.txt")) << "score\n0.9\n0.8\n0.95\n";
  std::ofstream(path("n.txt")) << "0.1\n0.2\n0.3\n0.85\n0.4\n";
  const Result b = run_cli({"build", "--keys-file", path("k.txt"), "--nonkeys-file", path("n.txt"),
                            "--segments", "10", "--regions", "2", "--fpr", "0.1", "--filter-out",
                            path("cols.plbf")});
  EXPECT_EQ(b.code, kOk) << b.err;
  EXPECT_EQ(run_cli({"query", "--filter", path("cols.plbf"), "--element", "key-1", "--score", "0.8"})
                .code,
            kOk);
}

TEST_F(CliTest, BuildErrors) {
  EXPECT_EQ(run_cli({"build", "--scores", path("nope.csv"), "--filter-out", path("x")}).code, kIo);
  std::ofstream(path("bad.csv")) << "id,score,label\na,2.0,key\n";
  EXPECT_EQ(run_cli({"build", "--scores", path("bad.csv"), "--filter-out", path("x")}).code, kUsage);
  EXPECT_EQ(run_cli({"build", "--scores", path("scores.csv"), "--fpr", "1.0", "--filter-out",
                     path("x")}).code,
            kUsage);
  EXPECT_EQ(run_cli({"build", "--scores", path("scores.csv"), "--variant-c", "0.5", "--filter-out",
                     path("x")}).code,
            kUsage);
  EXPECT_EQ(run_cli({"build", "--scores", path("scores.csv")}).code, kUsage);
  EXPECT_EQ(run_cli({"build", "--scores", path("scores.csv"), "--filter-out",
                     path("no/such/dir/x.plbf")}).code,
            kIo);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run_cli({"sweep", "--scores", path("scores.csv"), "--format", "xml"}).code, kUsage);
  EXPECT_EQ(run_cli({"sweep", "--scores", path("scores.csv"), "--methods", "adabf"}).code, kUsage);
  EXPECT_EQ(run_cli({"--help"}).code, kOk);
}

TEST_F(CliTest, SweepCsvAndJsonAreReproducible) {
  const std::vector<std::string> args = {"sweep", "--scores", path("scores.csv"), "--fprs",
                                         "0.01,0.001"};
  const Result a = run_cli(args);
  const Result b = run_cli(args);
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 9);

  auto json_args = args;
  json_args.insert(json_args.end(), {"--format", "json", "--out", path("sweep.json")});
  ASSERT_EQ(run_cli(json_args).code, kOk);
  const std::string first = slurp(path("sweep.json"));
  ASSERT_EQ(run_cli(json_args).code, kOk);
  EXPECT_EQ(slurp(path("sweep.json")), first);
  EXPECT_EQ(nlohmann::json::parse(first)["rows"].size(), 8u);
}

TEST_F(CliTest, SweepDefaultsCoverAllMethodsAndRates) {
  const Result r = run_cli({"sweep", "--scores", path("scores.csv")});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1 + 4 * 7);
}

TEST_F(CliTest, RegionsSweep) {
  const Result r = run_cli({"regions-sweep", "--scores", path("scores.csv"), "--k-list", "1,2,5"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,saved_bits,divergence,backup_bits,realized_saved_bits,reference");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 4), "1,0,");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);  // k = 2, 5 and the k = 25 reference
  EXPECT_EQ(run_cli({"regions-sweep", "--scores", path("scores.csv"), "--k-list", "5,2"}).code,
            kUsage);
}

TEST_F(CliTest, ZeroSkewSavesAlmostNothing) {
  ASSERT_EQ(run_cli({"synth", "--skew", "1e-9", "--n-keys", "20000", "--n-nonkeys", "20000",
                     "--segments", "100", "--out", path("flat.csv")}).code,
            kOk);
  const Result b = run_cli({"build", "--scores", path("flat.csv"), "--segments", "100", "--fpr",
                            "0.01", "--filter-out", path("flat.plbf")});
  ASSERT_EQ(b.code, kOk) << b.err;
  const auto report = nlohmann::json::parse(b.out);
  const double plain = report["plain_bits"];
  const double backup = report["backup_bits"];
  EXPECT_LT(std::abs(plain - backup), 0.05 * plain);
}

}  // namespace
}  // namespace plbf::cli
