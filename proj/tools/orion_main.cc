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

// orion: command-line entry point.
//
// Exit codes: 0 success, 1 initialization or input error, 2 a fuzzing
// campaign produced findings.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orion/campaign.h"
#include "orion/errors.h"
#include "orion/executor.h"
#include "orion/kb.h"
#include "orion/rules.h"
#include "orion/seed_store.h"
#include "orion/sim_target.h"

namespace {

using orion::Json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFindings = 2;

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw orion::ConfigError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw orion::ConfigError(path + ": " + e.what());
  }
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw orion::Error("cannot write " + path);
  out << text;
}

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;
};

void AddConfigOptions(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.file, "Campaign config JSON file");
  cmd->add_option("--set", args.overrides, "Override a config key (key=value)")
      ->allow_extra_args(false);
}

// File, then ORION_WORKDIR, then --set overrides, then dedicated flags.
orion::CampaignConfig LoadConfig(const ConfigArgs& args) {
  orion::CampaignConfig config;
  if (!args.file.empty()) config = orion::CampaignConfig::FromJson(ReadJsonFile(args.file));
  if (const char* wd = std::getenv("ORION_WORKDIR"); wd && *wd) config.work_dir = wd;
  for (const std::string& o : args.overrides) config.ApplyOverride(o);
  return config;
}

int CmdRules(const std::string& category) {
  std::optional<orion::RuleCategory> c;
  if (category == "guided") c = orion::RuleCategory::kGuided;
  else if (category == "corner") c = orion::RuleCategory::kCornerCase;
  else if (!category.empty()) throw orion::ConfigError("category must be guided or corner");
  std::cout << orion::RuleCatalogJson(c).dump(2) << "\n";
  return kExitOk;
}

int CmdIngest(const std::string& store_dir, const std::string& source,
              const std::vector<std::string>& paths, bool reports) {
  if (reports) {
    std::size_t total = 0;
    std::ofstream out;
    if (!store_dir.empty()) {
      std::filesystem::create_directories(store_dir);
      out.open(std::filesystem::path(store_dir) / "reports.jsonl", std::ios::app);
    }
    for (const std::string& p : paths) {
      std::ifstream in(p);
      if (!in) throw orion::Error("cannot read " + p);
      const auto records = orion::kb::ParseReports(in);
      for (const auto& r : records)
        if (out) out << orion::kb::ReportToJson(r).dump() << "\n";
      total += records.size();
    }
    std::cout << Json{{"reports", total}}.dump() << "\n";
    return kExitOk;
  }
  std::optional<orion::Source> src;
  if (!source.empty()) {
    src = orion::ParseSource(source);
    if (!src) throw orion::ConfigError("unknown source: " + source);
  }
  orion::SeedStore store = orion::SeedStore::OpenOrCreate(store_dir);
  orion::IngestSummary total;
  for (const std::string& p : paths) {
    std::ifstream in(p);
    if (!in) throw orion::Error("cannot read " + p);
    const orion::IngestSummary s = store.Ingest(in, src);
    total.added += s.added;
    total.skipped += s.skipped;
    for (const auto& [k, n] : s.added_per_source) total.added_per_source[k] += n;
  }
  std::cout << total.ToJson().dump() << "\n";
  return kExitOk;
}

int CmdSimSeeds(const std::string& catalog_file, const std::string& out_path) {
  const Json cfg = catalog_file.empty() ? Json::object() : ReadJsonFile(catalog_file);
  const auto catalog = orion::sim::Catalog::FromJson(cfg);
  std::ostringstream out;
  for (const auto& r : catalog.SeedCatalog()) out << orion::RecordToJson(r).dump() << "\n";
  WriteOutput(out_path, out.str());
  return kExitOk;
}

int CmdFuzz(const ConfigArgs& args, const std::string& store,
            const std::optional<std::string>& rules,
            const std::string& out_path, bool quiet) {
  orion::CampaignConfig config = LoadConfig(args);
  if (!store.empty()) config.store = store;
  // An empty list disables every rule and runs the seeds unmutated.
  if (rules) config.ApplyOverride("rules=" + (rules->empty() ? std::string("[]") : *rules));
  std::unique_ptr<orion::Backend> backend;
  orion::SeedStore seeds;
  try {
    seeds = orion::OpenStore(config);
    backend = orion::MakeBackend(config);
  } catch (const orion::Error& e) {
    std::cerr << "orion fuzz: " << e.what() << "\n";
    return kExitError;
  }
  const orion::CampaignReport report = orion::RunCampaign(config, seeds, *backend);
  WriteOutput(out_path.empty() ? "report.json" : out_path, report.ToJson().dump(2) + "\n");
  if (!quiet) std::cout << report.SummaryTable();
  return report.findings.empty() ? kExitOk : kExitFindings;
}

int CmdReplay(const ConfigArgs& args, const std::string& report_path,
              const std::string& case_id, const std::string& case_log) {
  const orion::CampaignReport report =
      orion::CampaignReport::FromJson(ReadJsonFile(report_path));
  orion::CampaignConfig config;
  if (args.file.empty() && !report.config.empty()) {
    config = orion::CampaignConfig::FromJson(report.config);
    if (const char* wd = std::getenv("ORION_WORKDIR"); wd && *wd) config.work_dir = wd;
    for (const std::string& o : args.overrides) config.ApplyOverride(o);
  } else {
    config = LoadConfig(args);
  }
  auto backend = orion::MakeBackend(config);
  std::ifstream log;
  std::string log_path = case_log.empty() ? config.case_log : case_log;
  if (!log_path.empty()) log.open(log_path);
  const orion::CaseResult r =
      orion::ReplayCase(report, case_id, log.is_open() ? &log : nullptr, *backend, config);
  std::cout << Json{{"case_id", case_id}, {"device", r.device}, {"verdict", r.verdict.ToJson()}}
                   .dump(2)
            << "\n";
  return kExitOk;
}

int CmdClassifyReports(const std::string& reports_path, const std::string& taxonomy_path,
                       const std::string& exclusions_path, const std::string& annotations_path,
                       const std::string& out_path) {
  namespace kb = orion::kb;
  std::ifstream in(reports_path);
  if (!in) throw orion::Error("cannot read " + reports_path);
  const auto reports = kb::ParseReports(in);
  const kb::KeywordTaxonomy taxonomy = taxonomy_path.empty()
                                           ? kb::KeywordTaxonomy::Default()
                                           : kb::KeywordTaxonomy::FromJson(ReadJsonFile(taxonomy_path));
  const kb::ExclusionPolicy policy = exclusions_path.empty()
                                         ? kb::ExclusionPolicy{}
                                         : kb::ExclusionPolicy::FromJson(ReadJsonFile(exclusions_path));
  Json rows = Json::array();
  std::vector<kb::ReportRecord> kept;
  std::map<std::string, std::size_t> per_category;
  std::map<std::string, std::size_t> per_reason;
  for (const auto& r : reports) {
    const auto decision = kb::ApplyExclusions(r, policy);
    Json cats = Json::array();
    for (kb::Category c : kb::Classify(r, taxonomy)) {
      cats.push_back(kb::CategoryName(c));
      if (decision.keep) ++per_category[std::string(kb::CategoryName(c))];
    }
    Json row{{"id", r.id}, {"categories", cats}, {"kept", decision.keep}};
    if (decision.reason) {
      row["excluded_by"] = kb::ExclusionReasonName(*decision.reason);
      ++per_reason[std::string(kb::ExclusionReasonName(*decision.reason))];
    } else {
      kept.push_back(r);
    }
    rows.push_back(std::move(row));
  }
  Json out{{"reports", rows},
           {"kept", kept.size()},
           {"per_category", per_category},
           {"excluded", per_reason}};
  if (!annotations_path.empty()) {
    const auto annotations = kb::RootCauseAnnotations::Load(annotations_path);
    out["provenance"] = kb::BuildProvenance(kept, annotations).ToJson();
  }
  WriteOutput(out_path, out.dump(2) + "\n");
  return kExitOk;
}

int CmdListApis(const std::string& store_dir, const std::string& filter) {
  const auto f = orion::ParseApiFilter(filter);
  if (!f) throw orion::ConfigError("unknown filter: " + filter);
  const orion::SeedStore store = orion::SeedStore::Open(store_dir);
  for (const std::string& api : store.ListApis(*f)) std::cout << api << "\n";
  return kExitOk;
}

// Runs the external enumerator: `<command...> --root <root> --out <out>`.
int CmdEnumerateApis(const std::string& command, const std::string& root,
                     const std::string& out) {
  std::vector<std::string> argv;
  std::istringstream words(command);
  for (std::string w; words >> w;) argv.push_back(w);
  if (argv.empty()) throw orion::ConfigError("empty enumerator command");
  const std::string exe = orion::FindExecutable(argv[0]);
  if (exe.empty()) {
    std::cerr << "orion enumerate-apis: enumerator not available: " << argv[0] << "\n";
    return kExitError;
  }
  argv[0] = exe;
  argv.insert(argv.end(), {"--root", std::filesystem::absolute(root).string(), "--out",
                           std::filesystem::absolute(out).string()});
  std::vector<std::string> env;
  for (const char* key : {"PATH", "PYTHONPATH", "HOME", "LANG"})
    if (const char* v = std::getenv(key)) env.push_back(std::string(key) + "=" + v);
  const orion::ExecutionOutcome o = orion::RunSandboxed(
      argv, std::filesystem::current_path(), env, std::chrono::minutes(10), 0);
  std::cout << o.stdout_bytes;
  std::cerr << o.stderr_bytes;
  if (o.infra_error || o.timed_out || o.signal || o.exit_status.value_or(1) != 0) {
    std::cerr << "orion enumerate-apis: enumerator failed\n";
    return kExitError;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"API-level fuzzer for deep learning libraries"};
  app.require_subcommand(1);

  std::string category;
  auto* rules_cmd = app.add_subcommand("rules", "Print the mutation rule catalog");
  rules_cmd->add_option("--category", category, "guided or corner");

  std::string store_dir;
  std::string source;
  std::vector<std::string> paths;
  bool reports = false;
  auto* ingest = app.add_subcommand("ingest", "Ingest seed (or report) JSONL files");
  ingest->add_option("--store", store_dir, "Seed store directory")->required();
  ingest->add_option("--source", source, "Override the source tag (docs, repos, dev-tests, synthetic)");
  ingest->add_flag("--reports", reports, "Inputs are vulnerability reports");
  ingest->add_option("paths", paths, "JSONL files")->required();

  std::string catalog_file;
  std::string out_path;
  auto* sim_seeds = app.add_subcommand("sim-seeds", "Write the simulated target's seed JSONL");
  sim_seeds->add_option("--catalog", catalog_file, "Catalog config JSON");
  sim_seeds->add_option("--out", out_path, "Output file (default stdout)");

  ConfigArgs fuzz_args;
  std::string fuzz_store;
  std::optional<std::string> fuzz_rules;
  bool quiet = false;
  auto* fuzz = app.add_subcommand("fuzz", "Run a fuzzing campaign");
  AddConfigOptions(fuzz, fuzz_args);
  fuzz->add_option("--store", fuzz_store, "Seed store directory");
  fuzz->add_option("--rules", fuzz_rules, "Comma-separated rule ids to enable (empty for none)");
  fuzz->add_option("--out", out_path, "Report path (default report.json)");
  fuzz->add_flag("--quiet", quiet, "Do not print the summary table");

  ConfigArgs replay_args;
  std::string report_path;
  std::string case_id;
  std::string case_log;
  auto* replay = app.add_subcommand("replay", "Re-execute one case of a report");
  AddConfigOptions(replay, replay_args);
  replay->add_option("--report", report_path, "Campaign report JSON")->required();
  replay->add_option("--case", case_id, "Case id")->required();
  replay->add_option("--case-log", case_log, "Case log JSONL for non-finding cases");

  std::string taxonomy;
  std::string exclusions;
  std::string annotations;
  auto* classify = app.add_subcommand("classify-reports", "Classify vulnerability reports");
  classify->add_option("--reports", report_path, "Report JSONL")->required();
  classify->add_option("--taxonomy", taxonomy, "Keyword taxonomy JSON");
  classify->add_option("--exclusions", exclusions, "Exclusion policy JSON");
  classify->add_option("--annotations", annotations, "Root-cause annotation JSON");
  classify->add_option("--out", out_path, "Output file (default stdout)");

  std::string filter = "all";
  auto* list_apis = app.add_subcommand("list-apis", "List the apis of a seed store");
  list_apis->add_option("--store", store_dir, "Seed store directory")->required();
  list_apis->add_option("--filter", filter, "end-user, developer or all");

  std::string enum_cmd = "python3 -m orion_hooks.enumerate";
  if (const char* e = std::getenv("ORION_ENUMERATOR"); e && *e) enum_cmd = e;
  std::string root;
  auto* enumerate = app.add_subcommand("enumerate-apis", "Enumerate developer apis (external tool)");
  enumerate->add_option("--root", root, "Source tree root")->required();
  enumerate->add_option("--out", out_path, "Output JSON")->required();
  enumerate->add_option("--command", enum_cmd, "Enumerator command");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rules_cmd) return CmdRules(category);
    if (*ingest) return CmdIngest(store_dir, source, paths, reports);
    if (*sim_seeds) return CmdSimSeeds(catalog_file, out_path);
    if (*fuzz) return CmdFuzz(fuzz_args, fuzz_store, fuzz_rules, out_path, quiet);
    if (*replay) return CmdReplay(replay_args, report_path, case_id, case_log);
    if (*classify)
      return CmdClassifyReports(report_path, taxonomy, exclusions, annotations, out_path);
    if (*list_apis) return CmdListApis(store_dir, filter);
    if (*enumerate) return CmdEnumerateApis(enum_cmd, root, out_path);
  } catch (const orion::SchemaError& e) {
    std::cerr << "orion: schema error at " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "orion: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
