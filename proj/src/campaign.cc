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

#include "orion/campaign.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <thread>

#include "orion/errors.h"
#include "orion/rng.h"
#include "orion/sim_target.h"

namespace orion {
namespace {

constexpr std::uint64_t kNoSecond = ~std::uint64_t{0};

std::string_view ApiFilterName(ApiFilter f) {
  switch (f) {
    case ApiFilter::kEndUser:
      return "end-user";
    case ApiFilter::kDeveloper:
      return "developer";
    case ApiFilter::kAll:
      return "all";
  }
  return "all";
}

std::vector<std::string> Split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<RuleId> ParseRules(const Json& j) {
  std::set<RuleId> out;
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "all") return {kAllRules.begin(), kAllRules.end()};
    return ParseRules(Json(Split(s, ',')));
  }
  if (!j.is_array()) throw ConfigError("rules must be a list of rule names");
  for (const Json& r : j) {
    if (!r.is_string()) throw ConfigError("rules must be a list of rule names");
    const auto id = ParseRuleId(r.get<std::string>());
    if (!id) throw ConfigError("unknown rule: " + r.get<std::string>());
    out.insert(*id);
  }
  return out;
}

std::vector<std::string> StringList(const Json& j, char sep, const std::string& key) {
  if (j.is_string()) return Split(j.get<std::string>(), sep);
  try {
    return j.get<std::vector<std::string>>();
  } catch (const Json::exception&) {
    throw ConfigError(key + " must be a list of strings");
  }
}

Json RuleNames(const std::vector<RuleId>& rules) {
  Json out = Json::array();
  for (RuleId r : rules) out.push_back(RuleName(r));
  return out;
}

bool Enabled(const RuleTable& table, RuleId rule) {
  const RuleInfo& info = GetRuleInfo(rule);
  const auto& list = info.pairwise()
                         ? table.Pairwise(info.signature[0], info.signature[1])
                         : table.Unary(info.signature[0]);
  return std::find(list.begin(), list.end(), rule) != list.end();
}

Verdict Infra(std::string detail) {
  Verdict v;
  v.kind = VerdictKind::kInfraError;
  v.detail = std::move(detail);
  return v;
}

}  // namespace

// ---- Config ----------------------------------------------------------------

CampaignConfig CampaignConfig::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("campaign config must be a JSON object");
  CampaignConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "api_filter") {
        const auto f = ParseApiFilter(v.get<std::string>());
        if (!f) throw ConfigError("unknown api_filter: " + v.get<std::string>());
        c.api_filter = *f;
      } else if (key == "apis") {
        c.apis = StringList(v, ',', key);
      } else if (key == "num_iter") {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 1)
          throw ConfigError("num_iter must be an integer >= 1");
        c.num_iter = v.get<std::uint64_t>();
      } else if (key == "rules") {
        c.rules = ParseRules(v);
      } else if (key == "corner") {
        c.corner = CornerConfig::FromJson(v);
      } else if (key == "timeout_seconds") {
        c.timeout_seconds = v.get<double>();
      } else if (key == "workers") {
        c.workers = v.get<unsigned>();
      } else if (key == "backend") {
        c.backend = v.get<std::string>();
      } else if (key == "devices") {
        c.devices = StringList(v, ',', key);
      } else if (key == "master_seed") {
        c.master_seed = v.get<std::uint64_t>();
      } else if (key == "tol_rel") {
        c.tolerance.rel = v.get<double>();
      } else if (key == "tol_abs") {
        c.tolerance.abs = v.get<double>();
      } else if (key == "store") {
        c.store = v.get<std::string>();
      } else if (key == "sim_catalog") {
        c.sim_catalog = v;
      } else if (key == "profile") {
        c.profile = v;
      } else if (key == "runner") {
        c.runner = StringList(v, ' ', key);
      } else if (key == "work_dir") {
        c.work_dir = v.get<std::string>();
      } else if (key == "keep_artifacts") {
        c.keep_artifacts = v.get<bool>();
      } else if (key == "address_space_mb") {
        c.address_space_mb = v.get<std::uint64_t>();
      } else if (key == "case_log") {
        c.case_log = v.get<std::string>();
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.Validate();
  return c;
}

Json CampaignConfig::ToJson() const {
  std::vector<RuleId> rule_list(rules.begin(), rules.end());
  return Json{{"api_filter", ApiFilterName(api_filter)},
              {"apis", apis},
              {"num_iter", num_iter},
              {"rules", RuleNames(rule_list)},
              {"corner", corner.ToJson()},
              {"timeout_seconds", timeout_seconds},
              {"workers", workers},
              {"backend", backend},
              {"devices", devices},
              {"master_seed", master_seed},
              {"tol_rel", tolerance.rel},
              {"tol_abs", tolerance.abs},
              {"store", store},
              {"sim_catalog", sim_catalog},
              {"profile", profile},
              {"runner", runner},
              {"work_dir", work_dir},
              {"keep_artifacts", keep_artifacts},
              {"address_space_mb", address_space_mb},
              {"case_log", case_log}};
}

void CampaignConfig::ApplyOverride(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override must look like key=value: " + assignment);
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = Json::parse(text);
  } catch (const Json::parse_error&) {
    value = text;
  }
  Json j = ToJson();
  const std::size_t dot = key.find('.');
  if (dot == std::string::npos) {
    if (!j.contains(key)) throw ConfigError("unknown config key: " + key);
    j[key] = value;
  } else {
    const std::string outer = key.substr(0, dot);
    if (!j.contains(outer) || !j[outer].is_object())
      throw ConfigError("unknown config key: " + key);
    j[outer][key.substr(dot + 1)] = value;
  }
  *this = FromJson(j);
}

void CampaignConfig::Validate() const {
  if (num_iter < 1) throw ConfigError("num_iter must be >= 1");
  if (backend != "simulated" && backend != "scripted")
    throw ConfigError("backend must be 'simulated' or 'scripted'");
  if (devices.empty()) throw ConfigError("at least one device is required");
  if (!(timeout_seconds > 0)) throw ConfigError("timeout_seconds must be positive");
  if (runner.empty()) throw ConfigError("runner must not be empty");
}

// ---- Findings and report ---------------------------------------------------

Json Finding::ToJson() const {
  return Json{{"fingerprint", fingerprint},
              {"api", api},
              {"verdict", verdict.ToJson()},
              {"device", device},
              {"top_frame", top_frame},
              {"rules", RuleNames(rules)},
              {"all_rules", RuleNames({all_rules.begin(), all_rules.end()})},
              {"case", representative.ToJson()},
              {"occurrences", occurrences}};
}

Finding Finding::FromJson(const Json& j) {
  try {
    Finding f;
    f.fingerprint = j.at("fingerprint").get<std::string>();
    f.api = j.at("api").get<std::string>();
    f.verdict = Verdict::FromJson(j.at("verdict"));
    f.device = j.value("device", "");
    f.top_frame = j.value("top_frame", "");
    for (RuleId r : ParseRules(j.at("rules"))) f.rules.push_back(r);
    f.all_rules = ParseRules(j.value("all_rules", Json::array()));
    f.representative = GeneratedCase::FromJson(j.at("case"));
    f.occurrences = j.value("occurrences", std::uint64_t{1});
    return f;
  } catch (const Json::exception& e) {
    throw SerializationError(std::string("bad finding: ") + e.what());
  } catch (const ConfigError& e) {
    throw SerializationError(std::string("bad finding: ") + e.what());
  }
}

std::size_t CampaignReport::apis_with_findings() const {
  std::set<std::string> apis;
  for (const Finding& f : findings) apis.insert(f.api);
  return apis.size();
}

std::set<std::string> CampaignReport::fingerprints() const {
  std::set<std::string> out;
  for (const Finding& f : findings) out.insert(f.fingerprint);
  return out;
}

const Finding* CampaignReport::FindCase(const std::string& case_id) const {
  for (const Finding& f : findings)
    if (f.representative.case_id == case_id) return &f;
  return nullptr;
}

Json CampaignReport::ToJson() const {
  Json fs = Json::array();
  for (const Finding& f : findings) fs.push_back(f.ToJson());
  Json rules = Json::object();
  for (const auto& [id, s] : per_rule) {
    rules[RuleName(id)] = Json{{"cases", s.cases},       {"crashes", s.crashes},
                               {"hangs", s.hangs},       {"diffs", s.diffs},
                               {"invalid_input", s.invalid}, {"findings", s.findings}};
  }
  Json apis = Json::object();
  for (const auto& [api, s] : per_api) {
    Json verdicts = Json::object();
    for (const auto& [k, n] : s.verdicts) verdicts[std::string(VerdictKindName(k))] = n;
    apis[api] = Json{{"iterations", s.iterations},
                     {"cases", s.cases},
                     {"verdicts", verdicts},
                     {"findings", s.findings}};
  }
  return Json{{"config", config},
              {"findings", fs},
              {"per_rule_counts", rules},
              {"per_api_stats", apis},
              {"wall_time", wall_seconds},
              {"total_cases", total_cases},
              {"unique_fingerprints", unique_fingerprints()},
              {"apis_with_findings", apis_with_findings()}};
}

CampaignReport CampaignReport::FromJson(const Json& j) {
  CampaignReport r;
  try {
    r.config = j.value("config", Json::object());
    for (const Json& f : j.at("findings")) r.findings.push_back(Finding::FromJson(f));
    const Json rule_counts = j.value("per_rule_counts", Json::object());
    for (const auto& [name, s] : rule_counts.items()) {
      const auto id = ParseRuleId(name);
      if (!id) continue;
      RuleStats& st = r.per_rule[*id];
      st.cases = s.value("cases", std::uint64_t{0});
      st.crashes = s.value("crashes", std::uint64_t{0});
      st.hangs = s.value("hangs", std::uint64_t{0});
      st.diffs = s.value("diffs", std::uint64_t{0});
      st.invalid = s.value("invalid_input", std::uint64_t{0});
      st.findings = s.value("findings", std::uint64_t{0});
    }
    const Json api_stats = j.value("per_api_stats", Json::object());
    for (const auto& [api, s] : api_stats.items()) {
      ApiStats& st = r.per_api[api];
      st.iterations = s.value("iterations", std::uint64_t{0});
      st.cases = s.value("cases", std::uint64_t{0});
      st.findings = s.value("findings", std::uint64_t{0});
      const Json verdicts = s.value("verdicts", Json::object());
      for (const auto& [k, n] : verdicts.items())
        if (const auto kind = ParseVerdictKind(k)) st.verdicts[*kind] = n.get<std::uint64_t>();
    }
    r.wall_seconds = j.value("wall_time", 0.0);
    r.total_cases = j.value("total_cases", std::uint64_t{0});
  } catch (const Json::exception& e) {
    throw SerializationError(std::string("bad report: ") + e.what());
  }
  return r;
}

std::string CampaignReport::SummaryTable() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-5s %-7s %10s %8s %6s %6s %9s\n", "rule", "class",
                "cases", "crashes", "hangs", "diffs", "findings");
  out << line;
  for (RuleId id : kAllRules) {
    auto it = per_rule.find(id);
    const RuleStats s = it == per_rule.end() ? RuleStats{} : it->second;
    std::snprintf(line, sizeof line, "%-5s %-7s %10llu %8llu %6llu %6llu %9llu\n",
                  RuleName(id).c_str(),
                  std::string(CategoryName(GetRuleInfo(id).category)).c_str(),
                  static_cast<unsigned long long>(s.cases),
                  static_cast<unsigned long long>(s.crashes),
                  static_cast<unsigned long long>(s.hangs),
                  static_cast<unsigned long long>(s.diffs),
                  static_cast<unsigned long long>(s.findings));
    out << line;
  }
  out << "unique findings: " << unique_fingerprints() << " (fingerprints), "
      << apis_with_findings() << " (apis)\n";
  out << "cases executed: " << total_cases << ", wall time: " << wall_seconds << " s\n";
  return out.str();
}

// ---- Generation --------------------------------------------------------------

std::vector<GeneratedCase> FuzzIteration(const TestInput& seed, std::uint64_t iteration,
                                         const RuleTable& table, bool passthrough,
                                         std::uint64_t master_seed,
                                         const CornerConfig& corner) {
  const std::uint64_t iter_key =
      KeyBuilder(master_seed).Add(seed.api_name).Add(iteration).key();
  std::vector<GeneratedCase> out;
  auto emit = [&](std::vector<ParamValue> params, std::vector<MutationNote> notes) {
    GeneratedCase c;
    c.api_name = seed.api_name;
    c.seed_record_id = seed.record_id;
    c.iteration = iteration;
    c.input = seed;
    c.input.params = std::move(params);
    c.notes = std::move(notes);
    c.case_id = MakeCaseId(c.api_name, c.seed_record_id, c.notes, iter_key);
    out.push_back(std::move(c));
  };
  if (passthrough) {
    emit(seed.params, {});
    return out;
  }
  auto attempt = [&](RuleId rule, const RuleTarget& target) {
    const std::uint64_t key =
        KeyBuilder(iter_key)
            .Add(RuleName(rule))
            .Add(static_cast<std::uint64_t>(target.first))
            .Add(target.second ? static_cast<std::uint64_t>(*target.second) : kNoSecond)
            .key();
    try {
      Mutation m = ApplyRule(rule, seed.params, target, key, corner);
      emit(std::move(m.params), {std::move(m.note)});
    } catch (const NotApplicable&) {
    } catch (const IllegalKindForType&) {
    }
  };
  const std::vector<ValueKind> sig = SignatureOf(seed.params);
  for (std::size_t j = 0; j < sig.size(); ++j)
    for (RuleId rule : table.Unary(sig[j])) attempt(rule, {j, std::nullopt});
  for (RuleId rule : kAllRules) {
    if (!GetRuleInfo(rule).pairwise() || !Enabled(table, rule)) continue;
    for (const RuleTarget& t : RuleTable::PairTargets(rule, sig)) attempt(rule, t);
  }
  return out;
}

// ---- Execution ---------------------------------------------------------------

CaseResult EvaluateCase(const GeneratedCase& c, Backend& backend,
                        const std::vector<std::string>& devices, const Tolerance& tol) {
  std::vector<ExecutionOutcome> outcomes;
  std::vector<Verdict> verdicts;
  try {
    for (const std::string& d : devices) {
      outcomes.push_back(backend.Execute(c, d));
      verdicts.push_back(Classify(outcomes.back(), backend.filtered_exceptions()));
      const VerdictKind k = verdicts.back().kind;
      if (k == VerdictKind::kCrash || k == VerdictKind::kHang)
        return {verdicts.back(), d, TopFrame(outcomes.back().stderr_bytes)};
    }
  } catch (const std::exception& e) {
    return {Infra(e.what()), "", ""};
  }
  for (VerdictKind wanted : {VerdictKind::kInvalidInput, VerdictKind::kInfraError}) {
    for (std::size_t i = 0; i < verdicts.size(); ++i)
      if (verdicts[i].kind == wanted) return {verdicts[i], devices[i], ""};
  }
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    try {
      Verdict v = Differential(outcomes[0], outcomes[i], tol);
      if (v.kind == VerdictKind::kDiffMismatch) return {v, devices[i], ""};
    } catch (const IncomparableOutputs& e) {
      return {Infra(std::string("incomparable outputs: ") + e.what()), devices[i], ""};
    }
  }
  return {verdicts.empty() ? Infra("no devices") : verdicts[0],
          devices.empty() ? "" : devices[0], ""};
}

std::unique_ptr<Backend> MakeBackend(const CampaignConfig& config) {
  if (config.backend == "simulated")
    return std::make_unique<SimulatedBackend>(sim::Catalog::FromJson(config.sim_catalog));
  ScriptedOptions o;
  o.runner = config.runner;
  o.profile = TargetProfile::FromJson(config.profile);
  o.work_dir = config.work_dir;
  o.timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(config.timeout_seconds * 1000.0));
  o.address_space_mb = config.address_space_mb;
  o.keep_artifacts = config.keep_artifacts;
  return std::make_unique<ScriptedBackend>(std::move(o));
}

SeedStore OpenStore(const CampaignConfig& config) {
  if (!config.store.empty()) return SeedStore::Open(config.store);
  if (config.backend != "simulated")
    throw ConfigError("a seed store is required with the scripted backend");
  SeedStore store;
  const std::vector<TraceRecord> seeds = sim::Catalog::FromJson(config.sim_catalog).SeedCatalog();
  store.Ingest(seeds);
  return store;
}

CampaignReport RunCampaign(const CampaignConfig& config, const SeedStore& store,
                           Backend& backend) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  CampaignReport report;
  report.config = config.ToJson();

  std::unique_ptr<std::ofstream> log;
  if (!config.case_log.empty()) {
    log = std::make_unique<std::ofstream>(config.case_log, std::ios::trunc);
    if (!*log) throw Error("cannot open case log " + config.case_log);
  }

  std::vector<std::string> apis;
  if (config.apis.empty()) {
    apis = store.ListApis(config.api_filter);
  } else {
    const std::vector<std::string> known = store.ListApis(ApiFilter::kAll);
    for (const std::string& a : config.apis)
      if (std::binary_search(known.begin(), known.end(), a)) apis.push_back(a);
  }

  const RuleTable table(config.rules);
  const bool passthrough = config.rules.empty();
  unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);

  std::map<std::string, Finding> findings;
  for (const std::string& api : apis) {
    ApiStats& stats = report.per_api[api];
    std::vector<GeneratedCase> cases;
    for (std::uint64_t it = 0; it < config.num_iter; ++it) {
      Rng rng(KeyBuilder(config.master_seed).Add("seed").Add(api).Add(it).key());
      const TestInput seed = store.RandomInput(api, rng);
      for (GeneratedCase& c :
           FuzzIteration(seed, it, table, passthrough, config.master_seed, config.corner))
        cases.push_back(std::move(c));
      ++stats.iterations;
    }

    std::vector<CaseResult> results(cases.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i = next++; i < cases.size(); i = next++)
        results[i] = EvaluateCase(cases[i], backend, config.devices, config.tolerance);
    };
    const unsigned n = std::min<std::size_t>(workers, std::max<std::size_t>(1, cases.size()));
    if (n <= 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < cases.size(); ++i) {
      const GeneratedCase& c = cases[i];
      const CaseResult& r = results[i];
      ++stats.cases;
      ++stats.verdicts[r.verdict.kind];
      ++report.total_cases;
      for (RuleId rule : c.rules()) {
        RuleStats& rs = report.per_rule[rule];
        ++rs.cases;
        if (r.verdict.kind == VerdictKind::kCrash) ++rs.crashes;
        if (r.verdict.kind == VerdictKind::kHang) ++rs.hangs;
        if (r.verdict.kind == VerdictKind::kDiffMismatch) ++rs.diffs;
        if (r.verdict.kind == VerdictKind::kInvalidInput) ++rs.invalid;
      }
      if (log) {
        *log << Json{{"case", c.ToJson()}, {"verdict", r.verdict.ToJson()}, {"device", r.device}}
                    .dump()
             << '\n';
      }
      if (!r.verdict.is_finding()) continue;
      const std::string fp = Fingerprint(api, r.verdict, r.top_frame);
      auto [entry, fresh] = findings.try_emplace(fp);
      Finding& f = entry->second;
      if (fresh) {
        f.fingerprint = fp;
        f.api = api;
        f.verdict = r.verdict;
        f.device = r.device;
        f.top_frame = r.top_frame;
        f.rules = c.rules();
        f.representative = c;
        ++stats.findings;
      }
      ++f.occurrences;
      for (RuleId rule : c.rules()) f.all_rules.insert(rule);
    }
  }

  for (auto& [fp, f] : findings) {
    for (RuleId rule : f.all_rules) ++report.per_rule[rule].findings;
    report.findings.push_back(std::move(f));
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---- Replay ------------------------------------------------------------------

std::optional<GeneratedCase> FindLoggedCase(std::istream& log, const std::string& case_id) {
  std::string line;
  while (std::getline(log, line)) {
    if (line.find(case_id) == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      const Json& c = j.contains("case") ? j.at("case") : j;
      if (c.value("case_id", "") == case_id) return GeneratedCase::FromJson(c);
    } catch (const Json::exception&) {
    }
  }
  return std::nullopt;
}

CaseResult ReplayCase(const CampaignReport& report, const std::string& case_id,
                      std::istream* case_log, Backend& backend,
                      const CampaignConfig& config) {
  std::optional<GeneratedCase> c;
  if (const Finding* f = report.FindCase(case_id)) c = f->representative;
  if (!c && case_log) c = FindLoggedCase(*case_log, case_id);
  if (!c) throw UnknownCase(case_id);
  return EvaluateCase(*c, backend, config.devices, config.tolerance);
}

}  // namespace orion
