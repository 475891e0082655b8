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

// JSON views of solver, sweep and measurement results.

#include <nlohmann/json.hpp>
#include <span>

#include "plbf/experiment.hpp"
#include "plbf/optimizer.hpp"
#include "plbf/plbf_filter.hpp"

namespace plbf {

void to_json(nlohmann::json& j, const PartitionPlan& plan);
void to_json(nlohmann::json& j, const RegionReport& region);
void to_json(nlohmann::json& j, const SolveReport& report);
void to_json(nlohmann::json& j, const FprEstimate& estimate);
void to_json(nlohmann::json& j, const SweepRow& row);
void to_json(nlohmann::json& j, const SweepReport& report);
void to_json(nlohmann::json& j, const RegionSweepRow& row);

nlohmann::json regions_json(std::span<const RegionSweepRow> rows);

}  // namespace plbf
