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


#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "orion/campaign.h"
#include "orion/errors.h"
#include "test_util.h"

namespace orion {
namespace {

using testing::Param;
using testing::Tensor;

CampaignConfig SimConfig(std::vector<std::string> bugs, std::set<RuleId> rules,
                         std::uint64_t num_iter = 50) {
  CampaignConfig c;
  c.sim_catalog = Json{{"bugs", bugs}};
  c.rules = std::move(rules);
  c.num_iter = num_iter;
  c.master_seed = 7;
  c.workers = 2;
  return c;
}

CampaignReport RunSim(const CampaignConfig& config) {
  const SeedStore store = OpenStore(config);
  auto backend = MakeBackend(config);
  return RunCampaign(config, store, *backend);
}

TestInput Seed(std::vector<Value> values) {
  TestInput t;
  t.api_name = "pkg.f";
  t.record_id = "r";
  t.params = testing::Params(std::move(values));
  return t;
}

TEST(CampaignTest, IterationCaseCounts) {
  const RuleTable table;
  const CornerConfig corner;
  EXPECT_EQ(FuzzIteration(Seed({Value::Tensor(Tensor({2, 2})), Value::Tensor(Tensor({2, 2}))}),
                          0, table, false, 1, corner)
                .size(),
            11u);
  EXPECT_EQ(FuzzIteration(Seed({Value::Bool(true)}), 0, table, false, 1, corner).size(), 1u);
  EXPECT_TRUE(FuzzIteration(Seed({}), 0, table, false, 1, corner).empty());
  const auto pass = FuzzIteration(Seed({Value::Bool(true)}), 0, RuleTable(std::set<RuleId>{}), true, 1, corner);
  ASSERT_EQ(pass.size(), 1u);
  EXPECT_TRUE(pass[0].notes.empty());
}

TEST(CampaignTest, IterationOneRulePerCase) {
  const RuleTable table;
  const auto cases =
      FuzzIteration(Seed({Value::Tensor(Tensor({2, 2})), Value::Int(1), testing::IntList({0, 1}),
                          Value::Str("ab")}),
                    3, table, false, 9, CornerConfig{});
  std::set<std::string> ids;
  for (const GeneratedCase& c : cases) {
    EXPECT_EQ(c.notes.size(), 1u);
    ids.insert(c.case_id);
  }
  EXPECT_EQ(ids.size(), cases.size());
}

TEST(CampaignTest, IterationIsDeterministic) {
  const RuleTable table;
  const TestInput seed = Seed({Value::Tensor(Tensor({3, 4})), testing::IntList({1, 0})});
  const auto a = FuzzIteration(seed, 5, table, false, 42, CornerConfig{});
  const auto b = FuzzIteration(seed, 5, table, false, 42, CornerConfig{});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].ToJson(), b[i].ToJson());
  const auto c = FuzzIteration(seed, 6, table, false, 42, CornerConfig{});
  EXPECT_NE(a[0].case_id, c[0].case_id);
}

TEST(CampaignTest, ShapeMismatchBugFoundByR1) {
  const CampaignReport r = RunSim(SimConfig({"r1_lu_unpack"}, {RuleId::kR1}));
  ASSERT_GE(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].verdict.kind, VerdictKind::kCrash);
  EXPECT_EQ(r.findings[0].rules, std::vector<RuleId>{RuleId::kR1});
  EXPECT_EQ(r.per_rule.at(RuleId::kR1).findings, 1u);
  EXPECT_EQ(r.per_api.at("sim.lu_unpack").iterations, 50u);
}

TEST(CampaignTest, PassThroughFindsNothing) {
  const CampaignReport r = RunSim(SimConfig({"r1_lu_unpack"}, {}));
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.total_cases, 50u);
}

TEST(CampaignTest, EmptyApiSelection) {
  CampaignConfig c = SimConfig({"r1_lu_unpack"}, {RuleId::kR1});
  c.apis = {"no.such.api"};
  const CampaignReport r = RunSim(c);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.total_cases, 0u);
  CampaignConfig dev = SimConfig({"r1_lu_unpack"}, {RuleId::kR1});
  dev.api_filter = ApiFilter::kDeveloper;
  EXPECT_EQ(RunSim(dev).total_cases, 0u);
}

TEST(CampaignTest, ReplayDeterminismAcrossWorkerCounts) {
  CampaignConfig a = SimConfig({}, {kAllRules.begin(), kAllRules.end()}, 30);
  a.sim_catalog = Json::object();
  a.devices = {"A", "B"};
  CampaignConfig b = a;
  b.workers = 5;
  const CampaignReport ra = RunSim(a);
  const CampaignReport rb = RunSim(b);
  EXPECT_EQ(ra.fingerprints(), rb.fingerprints());
  Json ja = ra.ToJson(), jb = rb.ToJson();
  ja.erase("wall_time");
  jb.erase("wall_time");
  ja["config"].erase("workers");
  jb["config"].erase("workers");
  EXPECT_EQ(ja, jb);
}

TEST(CampaignTest, NoInvalidInputFindings) {
  CampaignConfig c = SimConfig({}, {kAllRules.begin(), kAllRules.end()}, 20);
  c.sim_catalog = Json::object();
  const CampaignReport r = RunSim(c);
  std::uint64_t invalid = 0;
  for (const auto& [api, s] : r.per_api)
    if (s.verdicts.count(VerdictKind::kInvalidInput)) invalid += s.verdicts.at(VerdictKind::kInvalidInput);
  EXPECT_GT(invalid, 0u);
  for (const Finding& f : r.findings) EXPECT_TRUE(f.verdict.is_finding());
}

TEST(CampaignTest, ReportJsonRoundTrip) {
  const CampaignReport r = RunSim(SimConfig({"r14_pad", "r12_sort"}, {RuleId::kR12, RuleId::kR14}));
  const Json j = r.ToJson();
  for (const char* key : {"config", "findings", "per_rule_counts", "per_api_stats", "wall_time"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(j.at("unique_fingerprints"), r.findings.size());
  EXPECT_EQ(j.at("apis_with_findings"), 2);
  EXPECT_EQ(CampaignReport::FromJson(j).ToJson(), j);
  EXPECT_NE(r.SummaryTable().find("R14"), std::string::npos);
}

TEST(CampaignTest, ReplayCase) {
  const std::string log = (std::filesystem::temp_directory_path() / "orion_case_log.jsonl").string();
  CampaignConfig c = SimConfig({"r14_pad"}, {RuleId::kR14}, 20);
  c.case_log = log;
  const CampaignReport r = RunSim(c);
  ASSERT_FALSE(r.findings.empty());
  auto backend = MakeBackend(c);
  const Finding& f = r.findings[0];
  const CaseResult again = ReplayCase(r, f.representative.case_id, nullptr, *backend, c);
  EXPECT_EQ(again.verdict, f.verdict);
  EXPECT_EQ(Fingerprint(f.api, again.verdict, again.top_frame), f.fingerprint);

  // A benign case is only reachable through the case log.
  std::ifstream in(log);
  std::string benign_id;
  for (std::string line; std::getline(in, line);) {
    const Json j = Json::parse(line);
    if (j.at("verdict").at("kind") == "benign") {
      benign_id = j.at("case").at("case_id");
      break;
    }
  }
  ASSERT_FALSE(benign_id.empty());
  EXPECT_THROW(ReplayCase(r, benign_id, nullptr, *backend, c), UnknownCase);
  std::ifstream log_in(log);
  EXPECT_EQ(ReplayCase(r, benign_id, &log_in, *backend, c).verdict.kind, VerdictKind::kBenign);
  std::ifstream log_again(log);
  EXPECT_THROW(ReplayCase(r, "bogus", &log_again, *backend, c), UnknownCase);
  std::filesystem::remove(log);
}

TEST(CampaignTest, EvaluateCaseCombinesDevices) {
  SimulatedBackend backend(sim::Catalog::Default());
  GeneratedCase c;
  c.api_name = "sim.reduce_mean";
  c.input.api_name = c.api_name;
  c.input.params = {Param("input", 0, Value::Tensor(Tensor({2, 3}, 1e38)))};
  const CaseResult diff = EvaluateCase(c, backend, {"A", "B"}, Tolerance{});
  EXPECT_EQ(diff.verdict.kind, VerdictKind::kDiffMismatch);
  EXPECT_EQ(diff.device, "B");
  EXPECT_EQ(EvaluateCase(c, backend, {"A"}, Tolerance{}).verdict.kind, VerdictKind::kBenign);
  c.input.params[0] = Param("input", 0, Value::Tensor(Tensor({2, 3}, 2.0)));
  EXPECT_EQ(EvaluateCase(c, backend, {"A", "B"}, Tolerance{}).verdict.kind,
            VerdictKind::kBenign);
}

TEST(CampaignTest, ConfigParsing) {
  EXPECT_THROW(CampaignConfig::FromJson({{"bogus", 1}}), ConfigError);
  EXPECT_THROW(CampaignConfig::FromJson({{"num_iter", 0}}), ConfigError);
  EXPECT_THROW(CampaignConfig::FromJson({{"backend", "gpu"}}), ConfigError);
  EXPECT_THROW(CampaignConfig::FromJson({{"rules", {"R15"}}}), ConfigError);
  CampaignConfig c;
  c.ApplyOverride("rules=R1,R5");
  EXPECT_EQ(c.rules, (std::set<RuleId>{RuleId::kR1, RuleId::kR5}));
  c.ApplyOverride("devices=A,B");
  EXPECT_EQ(c.devices, (std::vector<std::string>{"A", "B"}));
  c.ApplyOverride("num_iter=12");
  EXPECT_EQ(c.num_iter, 12u);
  c.ApplyOverride("corner.large_int=99");
  EXPECT_EQ(c.corner.large_int, 99);
  c.ApplyOverride("rules=[]");
  EXPECT_TRUE(c.rules.empty());
  EXPECT_THROW(c.ApplyOverride("nope=1"), ConfigError);
  EXPECT_THROW(c.ApplyOverride("corner.nope=1"), ConfigError);
  EXPECT_THROW(c.ApplyOverride("novalue"), ConfigError);
  const CampaignConfig back = CampaignConfig::FromJson(c.ToJson());
  EXPECT_EQ(back.ToJson(), c.ToJson());
}

TEST(CampaignTest, MissingStoreFailsAtInit) {
  CampaignConfig c;
  c.store = "/nonexistent/orion-store";
  EXPECT_THROW(OpenStore(c), Error);
  CampaignConfig scripted;
  scripted.backend = "scripted";
  EXPECT_THROW(OpenStore(scripted), ConfigError);
}

}  // namespace
}  // namespace orion
