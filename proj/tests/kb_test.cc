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


#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "kb_fixtures.h"
#include "orion/errors.h"
#include "orion/kb.h"

namespace orion::kb {
namespace {

ReportRecord Report(std::string id, std::string title, std::string body) {
  ReportRecord r;
  r.id = std::move(id);
  r.title = std::move(title);
  r.body = std::move(body);
  return r;
}

TEST(KbTest, ClassifyExamples) {
  const KeywordTaxonomy t = KeywordTaxonomy::Default();
  EXPECT_EQ(Classify(Report("1", "", "ASAN reports heap buffer overflow in gather"), t),
            std::set<Category>{Category::kMemory});
  EXPECT_EQ(Classify(Report("2", "", "wrong result from matmul"), t),
            std::set<Category>{Category::kLogical});
  EXPECT_TRUE(Classify(Report("3", "", "update README badges"), t).empty());
}

TEST(KbTest, DefaultTaxonomyMatchesStudyLists) {
  const KeywordTaxonomy t = KeywordTaxonomy::Default();
  std::size_t total = 0;
  for (const auto& [c, kws] : t.keywords) total += kws.size();
  EXPECT_EQ(total, testing::StudyKeywords().size());
  for (const auto& k : testing::StudyKeywords()) {
    std::string lower = k.keyword;
    for (char& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const auto& kws = t.keywords.at(k.category);
    EXPECT_NE(std::find(kws.begin(), kws.end(), lower), kws.end()) << k.keyword;
  }
}

TEST(KbTest, KeywordSentencesHaveNoFalseNegatives) {
  const KeywordTaxonomy t = KeywordTaxonomy::Default();
  for (const auto& [report, category] : testing::KeywordSentences())
    EXPECT_TRUE(Classify(report, t).count(category))
        << report.id << ": " << report.title << " / " << report.body;
}

TEST(KbTest, ClassifyIsMonotone) {
  KeywordTaxonomy t = KeywordTaxonomy::Default();
  std::vector<std::set<Category>> before;
  const auto fixture = testing::KeywordSentences();
  for (const auto& [r, c] : fixture) before.push_back(Classify(r, t));
  t.keywords[Category::kLogical].push_back("attached");
  t.keywords[Category::kPerformance].push_back("op");
  for (std::size_t i = 0; i < fixture.size(); ++i) {
    const auto after = Classify(fixture[i].first, t);
    for (Category c : before[i]) EXPECT_TRUE(after.count(c));
  }
}

TEST(KbTest, TaxonomyValidation) {
  EXPECT_THROW(KeywordTaxonomy::FromJson({{"memory", {"Overflow"}}}), ConfigError);
  EXPECT_THROW(KeywordTaxonomy::FromJson({{"memory", {"  "}}}), ConfigError);
  EXPECT_THROW(KeywordTaxonomy::FromJson({{"numerical", {"x"}}}), ConfigError);
  const KeywordTaxonomy t = KeywordTaxonomy::FromJson(KeywordTaxonomy::Default().ToJson());
  EXPECT_EQ(t.ToJson(), KeywordTaxonomy::Default().ToJson());
}

TEST(KbTest, ExclusionFixture) {
  for (const auto& c : testing::ExclusionFixture()) {
    const ExclusionDecision d = ApplyExclusions(c.report);
    EXPECT_EQ(d.keep, c.keep) << c.report.id;
    if (!c.keep) {
      ASSERT_TRUE(d.reason) << c.report.id;
      EXPECT_EQ(*d.reason, c.reason) << c.report.id;
    } else {
      EXPECT_FALSE(d.reason) << c.report.id;
    }
  }
}

TEST(KbTest, ProvenanceTable) {
  ReportRecord shape = Report("a", "", "");
  ReportRecord plain = Report("b", "", "");
  ReportRecord inline_cause = Report("c", "", "");
  inline_cause.root_cause = "non-ascii-string";
  RootCauseAnnotations ann =
      RootCauseAnnotations::FromJson({{"annotations", {{"a", "shape-mismatch"}}}});
  const std::vector<ReportRecord> kept = {shape, plain, inline_cause};
  const ProvenanceTable table = BuildProvenance(kept, ann);
  EXPECT_EQ(table.buckets.at("R1"), std::vector<std::string>{"a"});
  EXPECT_EQ(table.buckets.at("R13"), std::vector<std::string>{"c"});
  EXPECT_EQ(table.buckets.at(kUnmapped), std::vector<std::string>{"b"});
  EXPECT_TRUE(BuildProvenance({}, ann).buckets.empty());
}

TEST(KbTest, AnnotationFileRequired) {
  EXPECT_THROW(RootCauseAnnotations::Load("/nonexistent/annotations.json"), AnnotationMissing);
  EXPECT_THROW(RootCauseAnnotations::FromJson({{"extra", 1}}), ConfigError);
  EXPECT_THROW(RootCauseAnnotations::FromJson({{"root_cause_rules", {{"x", {"R99"}}}}}),
               ConfigError);
}

TEST(KbTest, ParseReports) {
  std::istringstream in(
      R"({"id":"1","title":"t","body":"b","labels":["x"],"platforms":["linux"]})"
      "\n\n"
      R"({"id":"2","title":"t","body":"b","requires_input":false})"
      "\n");
  const auto reports = ParseReports(in);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_EQ(reports[0].labels, std::vector<std::string>{"x"});
  EXPECT_EQ(reports[1].requires_input, false);
  std::istringstream bad("{\"id\":\"1\"}\n{oops\n");
  EXPECT_THROW(ParseReports(bad), SchemaError);
}

}  // namespace
}  // namespace orion::kb
