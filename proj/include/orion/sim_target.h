// Copyright 2026 The Orion Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// An in-process simulated API surface with planted vulnerabilities.
//
// Each API validates its arguments like a real library would (raising
// ValueError on bad input) but checks its planted trigger first. A trigger
// match yields a simulated fault. Benign behavior is computed from fill
// descriptors in closed form, so huge shapes cost nothing.
//
// Device labels "B" and "gpu" select the divergent arithmetic path used by
// the differential bug; every other API is device independent.

#ifndef ORION_SIM_TARGET_H_
#define ORION_SIM_TARGET_H_

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orion/codegen.h"
#include "orion/rules.h"
#include "orion/seed_store.h"
#include "orion/value.h"

namespace orion::sim {

enum class FaultKind { kSegfault, kAbort, kHang, kWrongOutputOnB };

std::string_view FaultKindName(FaultKind kind);

using Trigger = std::function<bool(std::span<const ParamValue>)>;

struct PlantedBug {
  std::string bug_id;
  std::string api;
  // The rules expected to reach the trigger from the shipped seeds.
  std::set<RuleId> trigger_rules;
  FaultKind fault = FaultKind::kSegfault;
  std::string description;
  Trigger trigger;
};

struct SimResult {
  std::optional<OutputSummary> output;
  // Set when validation rejects the input.
  std::optional<std::string> exception;
  std::optional<FaultKind> fault;
  // The bug that fired, for faults and divergent outputs.
  std::string bug_id;
};

struct SimApiSpec {
  std::string api;
  std::vector<std::string> param_names;
  std::vector<TraceRecord> seeds;
  std::function<SimResult(std::span<const ParamValue>, bool divergent)> behavior;
};

class Catalog {
 public:
  // Every planted bug plus the bug-free control API.
  static Catalog Default();
  // {"bugs": [bug ids], "control": bool}. Absent "bugs" means every bug.
  // The control API defaults to present only when "bugs" is absent, so
  // {"bugs": []} is an empty catalog. Unknown ids throw ConfigError.
  static Catalog FromJson(const Json& j);

  // Throws UnknownApi.
  SimResult Invoke(std::string_view api, std::span<const ParamValue> params,
                   std::string_view device) const;

  // Benign seed records for every API in the catalog.
  std::vector<TraceRecord> SeedCatalog() const;

  const std::vector<PlantedBug>& bugs() const { return bugs_; }
  std::vector<std::string> apis() const;
  const PlantedBug* BugForApi(std::string_view api) const;
  const PlantedBug* FindBug(std::string_view bug_id) const;

 private:
  std::vector<PlantedBug> bugs_;
  std::map<std::string, SimApiSpec, std::less<>> specs_;
};

bool IsDivergentDevice(std::string_view device);

// Brute-force reachability over rules x shipped seeds x targets x rule seeds.
// Maps bug id -> rules for which some single mutation fires the trigger.
// `seeds_per_rule` bounds the rule-seed enumeration.
std::map<std::string, std::set<RuleId>> Reachability(const Catalog& catalog,
                                                     int seeds_per_rule,
                                                     const CornerConfig& config);

// Bug ids whose trigger fires on an unmutated shipped seed. Empty for a
// sound catalog.
std::vector<std::string> SoundnessViolations(const Catalog& catalog);

}  // namespace orion::sim

#endif  // ORION_SIM_TARGET_H_
