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

// The fuzzing campaign: driver, generator and finding aggregation.
//
// For every selected API the driver runs num_iter iterations. Each
// iteration fetches a random seed and produces one case per applicable
// (rule, target) pair, each carrying exactly one mutation. Cases of an API
// are executed by a worker pool and aggregated in generation order, so
// reports do not depend on the worker count.
//
// All randomness is keyed by (master seed, api, iteration, rule, target).

#ifndef ORION_CAMPAIGN_H_
#define ORION_CAMPAIGN_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orion/case.h"
#include "orion/codegen.h"
#include "orion/executor.h"
#include "orion/oracles.h"
#include "orion/rules.h"
#include "orion/seed_store.h"
#include "orion/value.h"

namespace orion {

struct CampaignConfig {
  ApiFilter api_filter = ApiFilter::kAll;
  // Explicit api names; empty selects every api passing api_filter.
  std::vector<std::string> apis;
  std::uint64_t num_iter = 1000;
  std::set<RuleId> rules{kAllRules.begin(), kAllRules.end()};
  CornerConfig corner;
  double timeout_seconds = 30.0;
  // 0 means one worker per hardware thread.
  unsigned workers = 0;
  std::string backend = "simulated";  // or "scripted"
  // One label runs the crash oracle only; two or more add the differential
  // oracle against the first.
  std::vector<std::string> devices = {"cpu"};
  std::uint64_t master_seed = 0;
  Tolerance tolerance;
  // Seed store directory. Empty with the simulated backend means an
  // in-memory store loaded from the simulated catalog.
  std::string store;
  Json sim_catalog = Json::object();
  Json profile = "python-mock";
  std::vector<std::string> runner = {"python3"};
  std::string work_dir = "work";
  bool keep_artifacts = false;
  std::uint64_t address_space_mb = 8192;
  // JSONL log of every executed case with its verdict; empty disables it.
  std::string case_log;

  // Unknown keys throw ConfigError.
  static CampaignConfig FromJson(const Json& j);
  Json ToJson() const;
  // Applies "key=value". The value is parsed as JSON when possible and
  // taken as a string otherwise; lists of rule names may be comma
  // separated. Throws ConfigError.
  void ApplyOverride(const std::string& assignment);
  // Checks the invariants (num_iter >= 1, known backend, ...).
  void Validate() const;
};

struct Finding {
  std::string fingerprint;
  std::string api;
  Verdict verdict;
  std::string device;
  std::string top_frame;
  // Rules applied in the representative case.
  std::vector<RuleId> rules;
  // Every rule whose cases hit this fingerprint.
  std::set<RuleId> all_rules;
  GeneratedCase representative;
  std::uint64_t occurrences = 0;

  Json ToJson() const;
  static Finding FromJson(const Json& j);
};

struct RuleStats {
  std::uint64_t cases = 0;
  std::uint64_t crashes = 0;
  std::uint64_t hangs = 0;
  std::uint64_t diffs = 0;
  std::uint64_t invalid = 0;
  // Unique findings hit by at least one case using the rule.
  std::uint64_t findings = 0;
};

struct ApiStats {
  std::uint64_t iterations = 0;
  std::uint64_t cases = 0;
  std::map<VerdictKind, std::uint64_t> verdicts;
  std::uint64_t findings = 0;
};

struct CampaignReport {
  Json config;
  std::vector<Finding> findings;  // Sorted by fingerprint.
  std::map<RuleId, RuleStats> per_rule;
  std::map<std::string, ApiStats> per_api;
  double wall_seconds = 0.0;
  std::uint64_t total_cases = 0;

  std::size_t unique_fingerprints() const { return findings.size(); }
  std::size_t apis_with_findings() const;
  std::set<std::string> fingerprints() const;
  const Finding* FindCase(const std::string& case_id) const;

  Json ToJson() const;
  static CampaignReport FromJson(const Json& j);
  // Findings by rule, one row per rule, plus totals.
  std::string SummaryTable() const;
};

// Cases for one iteration over `seed`. With an empty rule set the seed
// itself is returned unmutated as a single case.
std::vector<GeneratedCase> FuzzIteration(const TestInput& seed, std::uint64_t iteration,
                                         const RuleTable& table, bool passthrough,
                                         std::uint64_t master_seed,
                                         const CornerConfig& corner);

struct CaseResult {
  Verdict verdict;
  std::string device;
  std::string top_frame;
};

// Runs a case on every device and combines the oracles: a crash or hang on
// any device wins, then invalid input, then infrastructure errors; when
// every device is benign the differential oracle compares each device with
// the first.
CaseResult EvaluateCase(const GeneratedCase& c, Backend& backend,
                        const std::vector<std::string>& devices, const Tolerance& tol);

// Builds the backend a config asks for. Throws InfraError or ConfigError.
std::unique_ptr<Backend> MakeBackend(const CampaignConfig& config);

// Opens the store a config names. Throws Error if it is missing.
SeedStore OpenStore(const CampaignConfig& config);

CampaignReport RunCampaign(const CampaignConfig& config, const SeedStore& store,
                           Backend& backend);

// Reads a case log written by a campaign and returns the case with this id.
std::optional<GeneratedCase> FindLoggedCase(std::istream& log, const std::string& case_id);

// Re-executes one case: first from the report's findings, then from the
// optional case log. Throws UnknownCase.
CaseResult ReplayCase(const CampaignReport& report, const std::string& case_id,
                      std::istream* case_log, Backend& backend,
                      const CampaignConfig& config);

}  // namespace orion

#endif  // ORION_CAMPAIGN_H_
