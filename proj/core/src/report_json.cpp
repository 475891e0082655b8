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

#include "plbf/report_json.hpp"

namespace plbf {

void to_json(nlohmann::json& j, const PartitionPlan& plan) {
  j = {{"segments", plan.segments},
       {"boundaries", plan.boundaries},
       {"fprs", plan.fprs},
       {"target_f", plan.target_fpr}};
}

void to_json(nlohmann::json& j, const RegionReport& region) {
  j = {{"g", region.key_mass}, {"h", region.nonkey_mass}, {"f", region.fpr}, {"bits", region.bits}};
}

void to_json(nlohmann::json& j, const SolveReport& report) {
  j = {{"plan", report.plan},
       {"divergence_bits", report.divergence_bits},
       {"backup_bits", report.backup_bits},
       {"saved_bits", report.saved_bits},
       {"regions", report.regions},
       {"n_keys", report.n_keys},
       {"c", report.c},
       {"model_size_bits", report.model_size_bits},
       {"plain_bits", report.plain_bits}};
}

void to_json(nlohmann::json& j, const FprEstimate& estimate) {
  j = {{"positives", estimate.positives},
       {"queries", estimate.queries},
       {"rate", estimate.rate},
       {"ci_low", estimate.ci_low},
       {"ci_high", estimate.ci_high}};
}

void to_json(nlohmann::json& j, const SweepRow& row) {
  j = {{"method", std::string(to_string(row.method))},
       {"target_f", row.target_f},
       {"total_bits", row.total_bits},
       {"measured_fpr", row.measured_fpr},
       {"ci_low", row.ci_low},
       {"ci_high", row.ci_high},
       {"divergence_bits", row.divergence_bits},
       {"k", row.k},
       {"N", row.segments},
       {"seed", row.seed},
       {"queries", row.queries}};
  if (!row.error.empty()) j["error"] = row.error;
}

void to_json(nlohmann::json& j, const SweepReport& report) { j = {{"rows", report.rows}}; }

void to_json(nlohmann::json& j, const RegionSweepRow& row) {
  j = {{"k", row.k},
       {"saved_bits", row.saved_bits},
       {"divergence", row.divergence_bits},
       {"backup_bits", row.backup_bits},
       {"realized_saved_bits", row.realized_saved_bits},
       {"reference", row.reference}};
}

nlohmann::json regions_json(std::span<const RegionSweepRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const RegionSweepRow& row : rows) out.push_back(row);
  return {{"rows", out}};
}

}  // namespace plbf
