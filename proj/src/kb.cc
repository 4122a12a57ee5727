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

#include "orion/kb.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>

#include "orion/errors.h"

namespace orion::kb {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> Tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// True when the token sequence of `needle` appears contiguously in one of
// the tags.
bool TagMatches(std::span<const std::string> tags, std::span<const std::string> needles) {
  for (const std::string& tag : tags) {
    const auto tag_tokens = Tokens(tag);
    for (const std::string& needle : needles) {
      const auto want = Tokens(needle);
      if (want.empty() || want.size() > tag_tokens.size()) continue;
      for (std::size_t i = 0; i + want.size() <= tag_tokens.size(); ++i) {
        if (std::equal(want.begin(), want.end(), tag_tokens.begin() + i)) return true;
      }
    }
  }
  return false;
}

std::vector<std::string> StringList(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw SerializationError(std::string(key) + " must be an array");
  std::vector<std::string> out;
  for (const Json& e : *it) {
    if (!e.is_string()) throw SerializationError(std::string(key) + " entries must be strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::string OptString(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw SerializationError(std::string(key) + " must be a string");
  return it->get<std::string>();
}

}  // namespace

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kMemory:
      return "memory";
    case Category::kLogical:
      return "logical";
    case Category::kPerformance:
      return "performance";
  }
  return "?";
}

std::optional<Category> ParseCategory(std::string_view name) {
  for (Category c : {Category::kMemory, Category::kLogical, Category::kPerformance})
    if (CategoryName(c) == name) return c;
  return std::nullopt;
}

ReportRecord ReportFromJson(const Json& j) {
  if (!j.is_object()) throw SerializationError("report must be an object");
  ReportRecord r;
  auto id = j.find("id");
  if (id == j.end()) throw SerializationError("report needs an 'id'");
  r.id = id->is_string() ? id->get<std::string>() : id->dump();
  r.title = OptString(j, "title");
  r.body = OptString(j, "body");
  r.labels = StringList(j, "labels");
  r.platforms = StringList(j, "platforms");
  if (auto it = j.find("requires_input"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) throw SerializationError("requires_input must be a bool");
    r.requires_input = it->get<bool>();
  }
  if (auto cause = OptString(j, "root_cause"); !cause.empty()) r.root_cause = cause;
  return r;
}

Json ReportToJson(const ReportRecord& r) {
  Json j{{"id", r.id},
         {"title", r.title},
         {"body", r.body},
         {"labels", r.labels},
         {"platforms", r.platforms}};
  if (r.requires_input) j["requires_input"] = *r.requires_input;
  if (r.root_cause) j["root_cause"] = *r.root_cause;
  return j;
}

std::vector<ReportRecord> ParseReports(std::istream& in) {
  std::vector<ReportRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ReportFromJson(Json::parse(line)));
    } catch (const Json::exception& e) {
      throw SchemaError(lineno, e.what());
    } catch (const SerializationError& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return out;
}

KeywordTaxonomy KeywordTaxonomy::Default() {
  KeywordTaxonomy t;
  t.keywords[Category::kMemory] = {
      "buffer overflow",      "integer overflow", "integer underflow",
      "heap buffer overflow", "stack overflow",   "null pointer dereference"};
  t.keywords[Category::kLogical] = {
      "wrong result",         "unexpected output",   "incorrect calculation",
      "inconsistent behavior", "unexpected behavior", "incorrect logic",
      "wrong calculation"};
  t.keywords[Category::kPerformance] = {
      "slow",
      "high cpu usage",
      "high memory usage",
      "poor performance",
      "slow response time",
      "performance bottleneck",
      "performance optimization",
      "resource usage",
      "race condition",
      "memory leak"};
  return t;
}

KeywordTaxonomy KeywordTaxonomy::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("taxonomy must be an object");
  KeywordTaxonomy t;
  for (const auto& [name, list] : j.items()) {
    const auto c = ParseCategory(name);
    if (!c) throw ConfigError("unknown taxonomy category: " + name);
    if (!list.is_array()) throw ConfigError("taxonomy entries must be arrays");
    for (const Json& k : list) {
      if (!k.is_string()) throw ConfigError("keywords must be strings");
      std::string kw = k.get<std::string>();
      if (NormalizeText(kw).empty()) throw ConfigError("empty keyword in " + name);
      if (Lower(kw) != kw) throw ConfigError("keyword must be lowercase: " + kw);
      t.keywords[*c].push_back(std::move(kw));
    }
  }
  return t;
}

Json KeywordTaxonomy::ToJson() const {
  Json j = Json::object();
  for (const auto& [c, list] : keywords) j[std::string(CategoryName(c))] = list;
  return j;
}

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::set<Category> Classify(const ReportRecord& report,
                            const KeywordTaxonomy& taxonomy) {
  const std::string title = NormalizeText(report.title);
  const std::string body = NormalizeText(report.body);
  std::set<Category> out;
  for (const auto& [category, keywords] : taxonomy.keywords) {
    for (const std::string& kw : keywords) {
      const std::string needle = NormalizeText(kw);
      if (needle.empty()) continue;
      if (title.find(needle) != std::string::npos ||
          body.find(needle) != std::string::npos) {
        out.insert(category);
        break;
      }
    }
  }
  return out;
}

std::string_view ExclusionReasonName(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::kPlatform:
      return "platform";
    case ExclusionReason::kBuildConfig:
      return "build-config";
    case ExclusionReason::kExternal:
      return "external";
    case ExclusionReason::kNoInput:
      return "no-input";
  }
  return "?";
}

ExclusionPolicy ExclusionPolicy::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("exclusion policy must be an object");
  ExclusionPolicy p;
  for (const auto& [key, v] : j.items()) {
    std::vector<std::string>* dst = nullptr;
    if (key == "platforms") dst = &p.platforms;
    else if (key == "build_labels") dst = &p.build_labels;
    else if (key == "external_labels") dst = &p.external_labels;
    else if (key == "no_input_labels") dst = &p.no_input_labels;
    else throw ConfigError("unknown exclusion policy key: " + key);
    try {
      *dst = v.get<std::vector<std::string>>();
    } catch (const Json::exception& e) {
      throw ConfigError(key + ": " + e.what());
    }
  }
  return p;
}

ExclusionDecision ApplyExclusions(const ReportRecord& report,
                                  const ExclusionPolicy& policy) {
  auto drop = [](ExclusionReason r) { return ExclusionDecision{false, r}; };
  if (TagMatches(report.platforms, policy.platforms) ||
      TagMatches(report.labels, policy.platforms))
    return drop(ExclusionReason::kPlatform);
  if (TagMatches(report.labels, policy.build_labels))
    return drop(ExclusionReason::kBuildConfig);
  if (TagMatches(report.labels, policy.external_labels))
    return drop(ExclusionReason::kExternal);
  if ((report.requires_input && !*report.requires_input) ||
      TagMatches(report.labels, policy.no_input_labels))
    return drop(ExclusionReason::kNoInput);
  return {};
}

std::map<std::string, std::vector<RuleId>> RootCauseAnnotations::DefaultCauseRules() {
  using R = RuleId;
  return {
      {"shape-mismatch", {R::kR1}},
      {"rank-mismatch", {R::kR1}},
      {"dimension-mismatch", {R::kR2}},
      {"invalid-axis", {R::kR2}},
      {"list-rank-mismatch", {R::kR3}},
      {"out-of-bound-index", {R::kR4}},
      {"list-length-mismatch", {R::kR5}},
      {"nan-value", {R::kR6}},
      {"large-tensor-value", {R::kR6}},
      {"negative-tensor-value", {R::kR6}},
      {"zero-tensor-value", {R::kR6}},
      {"negative-dimension", {R::kR7, R::kR8}},
      {"zero-dimension", {R::kR7, R::kR8}},
      {"large-dimension", {R::kR7, R::kR8}},
      {"scalar-tensor", {R::kR9}},
      {"non-scalar-tensor", {R::kR10}},
      {"large-integer-argument", {R::kR11}},
      {"negative-integer-argument", {R::kR11}},
      {"none-argument", {R::kR11}},
      {"boolean-type-confusion", {R::kR12}},
      {"empty-string", {R::kR13}},
      {"non-ascii-string", {R::kR13}},
      {"large-list-element", {R::kR14}},
      {"empty-list", {R::kR14}},
  };
}

RootCauseAnnotations RootCauseAnnotations::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("annotation file must be an object");
  RootCauseAnnotations a;
  a.cause_rules = DefaultCauseRules();
  for (const auto& [key, v] : j.items()) {
    if (key == "annotations") {
      for (const auto& [id, cause] : v.items()) {
        if (!cause.is_string()) throw ConfigError("root cause must be a string");
        a.report_causes[id] = cause.get<std::string>();
      }
    } else if (key == "root_cause_rules") {
      for (const auto& [cause, rules] : v.items()) {
        std::vector<RuleId> ids;
        for (const Json& r : rules) {
          const auto id = r.is_string() ? ParseRuleId(r.get<std::string>()) : std::nullopt;
          if (!id) throw ConfigError("bad rule id for cause " + cause + ": " + r.dump());
          ids.push_back(*id);
        }
        a.cause_rules[cause] = std::move(ids);
      }
    } else {
      throw ConfigError("unknown annotation key: " + key);
    }
  }
  return a;
}

RootCauseAnnotations RootCauseAnnotations::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw AnnotationMissing("annotation file not found: " + path.string());
  try {
    return FromJson(Json::parse(in));
  } catch (const Json::exception& e) {
    throw ConfigError("annotation file " + path.string() + ": " + e.what());
  }
}

Json ProvenanceTable::ToJson() const {
  Json j = Json::object();
  for (const auto& [bucket, ids] : buckets) j[bucket] = ids;
  return j;
}

ProvenanceTable BuildProvenance(std::span<const ReportRecord> kept,
                                const RootCauseAnnotations& annotations) {
  ProvenanceTable table;
  for (const ReportRecord& r : kept) {
    std::optional<std::string> cause = r.root_cause;
    if (auto it = annotations.report_causes.find(r.id);
        it != annotations.report_causes.end())
      cause = it->second;
    const std::vector<RuleId>* rules = nullptr;
    if (cause) {
      auto it = annotations.cause_rules.find(*cause);
      if (it != annotations.cause_rules.end() && !it->second.empty()) rules = &it->second;
    }
    if (!rules) {
      table.buckets[kUnmapped].push_back(r.id);
      continue;
    }
    for (RuleId id : *rules) table.buckets[RuleName(id)].push_back(r.id);
  }
  for (auto& [bucket, ids] : table.buckets) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  }
  return table;
}

}  // namespace orion::kb
