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

#include <CLI11.hpp>

#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>

#include "plbf/errors.hpp"
#include "plbf/experiment.hpp"
#include "plbf/report_json.hpp"

namespace plbf::cli {
namespace {

struct Common {
  std::uint64_t seed = 42;
  std::uint32_t segments = 1000;
  std::uint32_t regions = 5;
  double variant_c = 1.0;
  double model_size_bits = 0.0;
  std::string out;
  std::string format = "csv";
};

struct Input {
  std::string scores;
  std::string keys_file;
  std::string nonkeys_file;
  double estimation_fraction = kDefaultEstimationFraction;
};

void add_common(CLI::App* app, Common& common, const std::string& default_format) {
  common.format = default_format;
  app->add_option("--seed", common.seed, "Master random seed")->capture_default_str();
  app->add_option("--segments,-N", common.segments, "Score-space segments")
      ->capture_default_str();
  app->add_option("--regions,-k", common.regions, "Regions")->capture_default_str();
  app->add_option("--variant-c", common.variant_c, "Backup filter space constant c")
      ->capture_default_str();
  app->add_option("--model-size-bits", common.model_size_bits, "Learned model size in bits")
      ->capture_default_str();
  app->add_option("--out,-o", common.out, "Output path (stdout when omitted)");
  app->add_option("--format", common.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
}

void add_input(CLI::App* app, Input& input) {
  auto* scores = app->add_option("--scores", input.scores, "Score CSV (id,score,label)");
  auto* keys = app->add_option("--keys-file", input.keys_file, "One key score per line");
  auto* nonkeys =
      app->add_option("--nonkeys-file", input.nonkeys_file, "One non-key score per line");
  scores->excludes(keys)->excludes(nonkeys);
  keys->needs(nonkeys);
  nonkeys->needs(keys);
  app->add_option("--estimation-fraction", input.estimation_fraction,
                  "Share of non-keys used for the histogram")
      ->capture_default_str();
}

std::vector<ScoreRecord> load_records(const Input& input) {
  if (!input.scores.empty()) return read_score_csv(input.scores);
  if (input.keys_file.empty()) {
    throw InvalidArgument("need --scores or both --keys-file and --nonkeys-file");
  }
  std::vector<ScoreRecord> records = read_score_column(input.keys_file, Label::kKey);
  std::vector<ScoreRecord> nonkeys = read_score_column(input.nonkeys_file, Label::kNonKey);
  records.insert(records.end(), std::make_move_iterator(nonkeys.begin()),
                 std::make_move_iterator(nonkeys.end()));
  return records;
}

Dataset load_dataset(const Input& input, const Common& common) {
  return prepare_dataset(load_records(input), input.estimation_fraction, common.seed);
}

ExperimentConfig experiment_config(const Common& common) {
  ExperimentConfig config;
  config.segments = common.segments;
  config.regions = common.regions;
  config.c = VariantConstant(common.variant_c);
  config.model_size_bits = common.model_size_bits;
  config.seed = common.seed;
  return config;
}

// Runs write against the --out file, or against out when no path was given.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + path + "'");
  write(file);
  file.flush();
  if (!file) throw IoError("failed writing output file '" + path + "'");
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open filter file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading filter file '" + path + "'");
  return bytes;
}

// synth ---------------------------------------------------------------------

struct SynthArgs {
  Common common;
  double skew = 1.5;
  std::uint64_t n_keys = 100000;
  std::uint64_t n_nonkeys = 100000;
};

void run_synth(const SynthArgs& a, std::ostream& out) {
  const ZipfConfig config{a.skew, a.n_keys, a.n_nonkeys, a.common.seed};
  const ScorePair pair = zipf_scores(config, a.common.segments);

  std::vector<ScoreRecord> records;
  records.reserve(a.n_keys + a.n_nonkeys);
  for (std::size_t i = 0; i < pair.keys.scores.size(); ++i) {
    records.push_back({"k" + std::to_string(i), pair.keys.scores[i], Label::kKey});
  }
  for (std::size_t i = 0; i < pair.nonkeys.scores.size(); ++i) {
    records.push_back({"n" + std::to_string(i), pair.nonkeys.scores[i], Label::kNonKey});
  }
  emit(a.common.out, out, [&](std::ostream& os) { write_score_csv(os, records); });

  const ScoreHistogram hist = build_histogram(pair.keys, pair.nonkeys, a.common.segments);
  const double divergence = kl_divergence(hist.key_mass(), hist.nonkey_mass());
  if (!a.common.out.empty()) {
    out << "keys=" << a.n_keys << " nonkeys=" << a.n_nonkeys
        << " segments=" << a.common.segments
        << " divergence_bits=" << format_double(divergence) << '\n';
  }
}

// build ---------------------------------------------------------------------

struct BuildArgs {
  Common common;
  Input input;
  double fpr = 0.001;
  std::string filter_out;
};

void run_build(const BuildArgs& a, std::ostream& out) {
  if (a.filter_out.empty()) throw InvalidArgument("--filter-out is required");
  const Dataset data = load_dataset(a.input, a.common);
  const ExperimentConfig config = experiment_config(a.common);
  const ScoreHistogram hist = dataset_histogram(data, config.segments);
  const SpaceModel model{data.keys.size(), config.c, config.model_size_bits};
  const SolveReport report = solve(hist, a.fpr, config.regions, model);
  const PlbfFilter filter = build_filter_exact(data, report, config.c, config.seed);

  const std::vector<std::uint8_t> bytes = serialize(filter);
  std::ofstream file(a.filter_out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open filter output '" + a.filter_out + "'");
  file.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
  if (!file.flush()) throw IoError("failed writing filter output '" + a.filter_out + "'");

  const FprEstimate heldout = measure_fpr(filter, data.evaluation_nonkeys);
  emit(a.common.out, out, [&](std::ostream& os) {
    if (a.common.format == "json") {
      nlohmann::json j = report;
      j["predicted_bits"] = report.backup_bits;
      j["realized_bits"] = filter.total_bits();
      j["heldout"] = heldout;
      os << j.dump(2) << '\n';
      return;
    }
    os << "region,lower,upper,g,h,f,predicted_bits,realized_bits\n";
    for (std::size_t r = 0; r < report.regions.size(); ++r) {
      const RegionReport& region = report.regions[r];
      os << r << ',' << report.plan.boundaries[r] << ',' << report.plan.boundaries[r + 1] << ','
         << format_double(region.key_mass) << ',' << format_double(region.nonkey_mass) << ','
         << format_double(region.fpr) << ',' << region.bits << ','
         << filter.backups()[r].bit_count() << '\n';
    }
  });
}

// query ---------------------------------------------------------------------

struct QueryArgs {
  std::string filter;
  std::string element;
  double score = 0.0;
};

int run_query(const QueryArgs& a, std::ostream& out) {
  const PlbfFilter filter = deserialize(read_bytes(a.filter));
  const bool positive = filter.query(a.element, a.score);
  out << (positive ? "positive" : "negative") << '\n';
  return positive ? kOk : kNegative;
}

// sweep ---------------------------------------------------------------------

struct SweepArgs {
  Common common;
  Input input;
  std::vector<double> fprs;
  std::vector<std::string> methods;
  std::uint64_t queries = 0;
};

void run_sweep_cmd(const SweepArgs& a, std::ostream& out) {
  std::vector<Method> methods;
  if (a.methods.empty()) methods = all_methods();
  for (const std::string& name : a.methods) {
    const std::optional<Method> m = parse_method(name);
    if (!m) throw InvalidArgument("unknown method '" + name + "'");
    methods.push_back(*m);
  }
  const std::vector<double> fprs = a.fprs.empty() ? default_fpr_sweep() : a.fprs;
  for (double f : fprs) {
    if (!(f > 0.0 && f < 1.0)) throw InfeasibleTarget("sweep rates must lie in (0,1)");
  }

  const Dataset data = load_dataset(a.input, a.common);
  ExperimentConfig config = experiment_config(a.common);
  config.queries = a.queries;
  const SweepReport report = run_sweep(data, fprs, methods, config);
  emit(a.common.out, out, [&](std::ostream& os) {
    if (a.common.format == "json") {
      os << nlohmann::json(report).dump(2) << '\n';
    } else {
      write_sweep_csv(os, report);
    }
  });
}

// regions-sweep -------------------------------------------------------------

struct RegionsArgs {
  Common common;
  Input input;
  double fpr = 0.001;
  std::vector<std::uint32_t> k_list;
};

void run_regions_cmd(const RegionsArgs& a, std::ostream& out) {
  std::vector<std::uint32_t> ks = a.k_list;
  if (ks.empty()) ks = {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 25};
  const Dataset data = load_dataset(a.input, a.common);
  const std::vector<RegionSweepRow> rows =
      run_regions_sweep(data, a.fpr, ks, experiment_config(a.common));
  emit(a.common.out, out, [&](std::ostream& os) {
    if (a.common.format == "json") {
      os << regions_json(rows).dump(2) << '\n';
    } else {
      write_regions_csv(os, rows);
    }
  });
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Partitioned learned Bloom filter toolkit", "plbf"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic Zipf score CSV");
  add_common(synth_cmd, synth.common, "csv");
  synth_cmd->add_option("--skew", synth.skew, "Zipf exponent")->capture_default_str();
  synth_cmd->add_option("--n-keys", synth.n_keys, "Key count")->capture_default_str();
  synth_cmd->add_option("--n-nonkeys", synth.n_nonkeys, "Non-key count")->capture_default_str();

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Solve, build and serialize a filter");
  add_common(build_cmd, build.common, "json");
  add_input(build_cmd, build.input);
  build_cmd->add_option("--fpr,-F", build.fpr, "Target overall false positive rate")
      ->capture_default_str();
  build_cmd->add_option("--filter-out", build.filter_out, "Serialized filter path")->required();

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Query a serialized filter");
  query_cmd->add_option("--filter", query.filter, "Serialized filter path")->required();
  query_cmd->add_option("--element", query.element, "Element to look up")->required();
  query_cmd->add_option("--score", query.score, "Model score of the element")->required();

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "False positive rate vs space sweep");
  add_common(sweep_cmd, sweep.common, "csv");
  add_input(sweep_cmd, sweep.input);
  sweep_cmd->add_option("--fprs", sweep.fprs, "Target rates (default sweep when omitted)")
      ->delimiter(',');
  sweep_cmd->add_option("--methods", sweep.methods, "Subset of methods")->delimiter(',');
  sweep_cmd->add_option("--queries", sweep.queries, "Resampled query count (0: full set)")
      ->capture_default_str();

  RegionsArgs regions;
  auto* regions_cmd = app.add_subcommand("regions-sweep", "Space saved vs region count");
  add_common(regions_cmd, regions.common, "csv");
  add_input(regions_cmd, regions.input);
  regions_cmd->add_option("--fpr,-F", regions.fpr, "Target overall false positive rate")
      ->capture_default_str();
  regions_cmd->add_option("--k-list", regions.k_list, "Ascending region counts")
      ->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth_cmd->parsed()) run_synth(synth, out);
    if (build_cmd->parsed()) run_build(build, out);
    if (query_cmd->parsed()) return run_query(query, out);
    if (sweep_cmd->parsed()) run_sweep_cmd(sweep, out);
    if (regions_cmd->parsed()) run_regions_cmd(regions, out);
    return kOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace plbf::cli
