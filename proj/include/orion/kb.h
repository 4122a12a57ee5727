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

// Mining of historical vulnerability reports: keyword classification,
// exclusion filtering, and the rule -> report provenance table.

#ifndef ORION_KB_H_
#define ORION_KB_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orion/rules.h"
#include "orion/value.h"

namespace orion::kb {

enum class Category { kMemory, kLogical, kPerformance };

std::string_view CategoryName(Category c);
std::optional<Category> ParseCategory(std::string_view name);

struct ReportRecord {
  std::string id;
  std::string title;
  std::string body;
  std::vector<std::string> labels;
  std::vector<std::string> platforms;
  // false marks a report whose bug triggers without any input parameters.
  std::optional<bool> requires_input;
  std::optional<std::string> root_cause;
};

ReportRecord ReportFromJson(const Json& j);
Json ReportToJson(const ReportRecord& r);
// JSONL; throws SchemaError with the line number.
std::vector<ReportRecord> ParseReports(std::istream& in);

struct KeywordTaxonomy {
  std::map<Category, std::vector<std::string>> keywords;

  // Keywords listed in the empirical study. Not exhaustive.
  static KeywordTaxonomy Default();
  // Keywords must be lowercase and non-empty; throws ConfigError.
  static KeywordTaxonomy FromJson(const Json& j);
  Json ToJson() const;
};

// Lowercases ASCII and collapses whitespace runs to one space.
std::string NormalizeText(std::string_view text);

// A category is included iff one of its keywords occurs in the normalized
// title or body.
std::set<Category> Classify(const ReportRecord& report,
                            const KeywordTaxonomy& taxonomy);

enum class ExclusionReason { kPlatform, kBuildConfig, kExternal, kNoInput };
std::string_view ExclusionReasonName(ExclusionReason r);

struct ExclusionPolicy {
  std::vector<std::string> platforms = {"windows", "android", "ios"};
  std::vector<std::string> build_labels = {"build", "config", "configuration",
                                           "installation", "ci"};
  std::vector<std::string> external_labels = {"torchvision", "torchaudio",
                                              "torchtext"};
  std::vector<std::string> no_input_labels = {"no-input"};

  static ExclusionPolicy FromJson(const Json& j);
};

struct ExclusionDecision {
  bool keep = true;
  std::optional<ExclusionReason> reason;
};

// Labels and platform tags are split into alphanumeric tokens and matched
// token-wise, case-insensitively. Checked in the order platform, build,
// external, no-input; the first hit is the recorded reason.
ExclusionDecision ApplyExclusions(const ReportRecord& report,
                                  const ExclusionPolicy& policy = {});

// Human-assigned root causes and their mapping onto rules.
struct RootCauseAnnotations {
  std::map<std::string, std::string> report_causes;
  std::map<std::string, std::vector<RuleId>> cause_rules;

  static std::map<std::string, std::vector<RuleId>> DefaultCauseRules();
  // {"annotations": {report_id: cause}, "root_cause_rules": {cause: ["R1"]}}.
  // Missing root_cause_rules entries fall back to the defaults.
  static RootCauseAnnotations FromJson(const Json& j);
  // Throws AnnotationMissing if the file does not exist.
  static RootCauseAnnotations Load(const std::filesystem::path& path);
};

inline constexpr char kUnmapped[] = "unmapped";

struct ProvenanceTable {
  // "R1".."R14" and "unmapped" -> sorted report ids.
  std::map<std::string, std::vector<std::string>> buckets;

  Json ToJson() const;
};

ProvenanceTable BuildProvenance(std::span<const ReportRecord> kept,
                                const RootCauseAnnotations& annotations);

}  // namespace orion::kb

#endif  // ORION_KB_H_
