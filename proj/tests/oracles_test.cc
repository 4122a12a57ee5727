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


#include <cmath>
#include <csignal>

#include <gtest/gtest.h>

#include "oracle_fixtures.h"
#include "orion/errors.h"
#include "orion/oracles.h"

namespace orion {
namespace {

using testing::Exited;
using testing::Killed;
using testing::WithSummary;

OutputSummary Summary(std::vector<std::int64_t> shape, std::vector<double> values) {
  OutputSummary s;
  s.shape = std::move(shape);
  s.dtype = "float32";
  s.count = values.size();
  s.values = std::move(values);
  return s;
}

TEST(OraclesTest, ClassifyTable) {
  for (const auto& c : testing::ClassifyTable()) {
    const Verdict v = Classify(c.outcome);
    EXPECT_EQ(v.kind, c.kind) << c.name;
    EXPECT_EQ(v.detail, c.detail) << c.name;
  }
}

TEST(OraclesTest, ClassifyCarriesSignalAndException) {
  EXPECT_EQ(Classify(Killed(SIGSEGV)).signal, SIGSEGV);
  EXPECT_EQ(Classify(Exited(0, "ORION::EXC:ValueError\n")).exception, "ValueError");
  EXPECT_EQ(Classify(Exited(0, "ORION::EXC:IndexError\n")).exception, "IndexError");
  // The filter list is the profile's, not a fixed one.
  EXPECT_EQ(Classify(Exited(0, "ORION::EXC:IndexError\n"), {"IndexError"}).kind,
            VerdictKind::kInvalidInput);
  EXPECT_EQ(Classify(Exited(0, "ORION::EXC:ValueError\n"), {}).kind, VerdictKind::kCrash);
}

TEST(OraclesTest, TimeoutWinsOverMarkers) {
  ExecutionOutcome o = Exited(0, "ORION::EXC:ValueError\n");
  o.exit_status.reset();
  o.timed_out = true;
  EXPECT_EQ(Classify(o).kind, VerdictKind::kHang);
}

TEST(OraclesTest, ClassifyIsTotalOverRandomOutcomes) {
  Rng rng(KeyBuilder(21).Add("classify").key());
  const char* stdouts[] = {"", "ORION::OK\n", "ORION::EXC:ValueError\n", "ORION::EXC:KeyError\n",
                           "garbage\n", "ORION::OK\nORION-OUT-BEGIN\n[1]\nORION-OUT-END\n"};
  const char* stderrs[] = {"", "Traceback (most recent call last):\n", "#0 0xdead in f\n"};
  for (int i = 0; i < 1000; ++i) {
    ExecutionOutcome o;
    switch (rng.Below(3)) {
      case 0:
        o.exit_status = static_cast<int>(rng.Below(3));
        break;
      case 1:
        o.signal = rng.Coin() ? SIGSEGV : SIGABRT;
        break;
      default:
        o.timed_out = true;
    }
    o.infra_error = rng.Below(10) == 0;
    o.stdout_bytes = stdouts[rng.Below(std::size(stdouts))];
    o.stderr_bytes = stderrs[rng.Below(std::size(stderrs))];
    o.markers = ParseMarkers(o.stdout_bytes);
    const Verdict a = Classify(o);
    EXPECT_EQ(a, Classify(o));
    if (o.infra_error) {
      EXPECT_EQ(a.kind, VerdictKind::kInfraError);
    } else if (o.timed_out) {
      EXPECT_EQ(a.kind, VerdictKind::kHang);
    } else if (o.signal) {
      EXPECT_EQ(a.kind, VerdictKind::kCrash);
    }
    EXPECT_NE(a.kind, VerdictKind::kDiffMismatch);
  }
}

TEST(OraclesTest, DifferentialExamples) {
  const Tolerance tol;
  const OutputSummary s = Summary({2}, {1.0, 2.0});
  EXPECT_EQ(Differential(WithSummary(s), WithSummary(s), tol).kind, VerdictKind::kBenign);

  const Verdict d = CompareSummaries(Summary({1}, {1.0}), Summary({1}, {1.0 + 2e-6}),
                                     Tolerance{1e-6, 0.0});
  EXPECT_EQ(d.kind, VerdictKind::kDiffMismatch);
  EXPECT_NEAR(d.max_delta, 2e-6, 1e-15);

  EXPECT_EQ(CompareSummaries(Summary({2}, {1.0, 2.0}), Summary({2, 1}, {1.0, 2.0}), tol).kind,
            VerdictKind::kDiffMismatch);
}

TEST(OraclesTest, DifferentialTolerances) {
  const Tolerance tol{1e-6, 1e-9};
  EXPECT_EQ(CompareSummaries(Summary({1}, {1.0}), Summary({1}, {1.0 + 5e-7}), tol).kind,
            VerdictKind::kBenign);
  EXPECT_EQ(CompareSummaries(Summary({1}, {0.0}), Summary({1}, {5e-10}), tol).kind,
            VerdictKind::kBenign);
  EXPECT_EQ(CompareSummaries(Summary({1}, {0.0}), Summary({1}, {5e-9}), tol).kind,
            VerdictKind::kDiffMismatch);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(CompareSummaries(Summary({1}, {nan}), Summary({1}, {nan}), tol).kind,
            VerdictKind::kBenign);
  EXPECT_EQ(CompareSummaries(Summary({1}, {nan}), Summary({1}, {1.0}), tol).kind,
            VerdictKind::kDiffMismatch);
  EXPECT_EQ(CompareSummaries(Summary({1}, {inf}), Summary({1}, {inf}), tol).kind,
            VerdictKind::kBenign);
  EXPECT_EQ(CompareSummaries(Summary({1}, {inf}), Summary({1}, {1e300}), tol).kind,
            VerdictKind::kDiffMismatch);
  OutputSummary a = Summary({1}, {1.0});
  OutputSummary b = a;
  b.dtype = "float64";
  EXPECT_EQ(CompareSummaries(a, b, tol).detail, "dtype");
}

TEST(OraclesTest, DifferentialNeedsBlocks) {
  EXPECT_THROW(Differential(Exited(0, "ORION::OK\n"), Exited(0, "ORION::OK\n"), Tolerance{}),
               IncomparableOutputs);
  EXPECT_THROW(Differential(Exited(0, "ORION::OK\nORION-OUT-BEGIN\n{oops\nORION-OUT-END\n"),
                            Exited(0, "ORION::OK\nORION-OUT-BEGIN\n[1]\nORION-OUT-END\n"),
                            Tolerance{}),
               IncomparableOutputs);
}

TEST(OraclesTest, DifferentialIsSymmetric) {
  Rng rng(KeyBuilder(22).Add("symmetry").key());
  const Tolerance tol;
  for (int i = 0; i < 1000; ++i) {
    const OutputSummary a = testing::RandomSummary(rng);
    const OutputSummary b = testing::Perturb(a, rng);
    const Verdict ab = Differential(WithSummary(a), WithSummary(b), tol);
    const Verdict ba = Differential(WithSummary(b), WithSummary(a), tol);
    ASSERT_EQ(ab.kind, ba.kind) << i;
    ASSERT_EQ(ab.max_delta, ba.max_delta) << i;
  }
}

TEST(OraclesTest, FingerprintExamples) {
  const Verdict segv = Classify(Killed(SIGSEGV));
  const Verdict abrt = Classify(Killed(SIGABRT));
  ExecutionOutcome t;
  t.timed_out = true;
  const Verdict hang = Classify(t);
  EXPECT_EQ(Fingerprint("api", segv, "#0 f"), Fingerprint("api", segv, "#0 f"));
  EXPECT_NE(Fingerprint("api", segv, "#0 f"), Fingerprint("api", abrt, "#0 f"));
  EXPECT_NE(Fingerprint("api", segv, ""), Fingerprint("api", hang, ""));
  EXPECT_NE(Fingerprint("api", segv, "#0 f"), Fingerprint("other", segv, "#0 f"));
  EXPECT_NE(Fingerprint("api", segv, "#0 f"), Fingerprint("api", segv, "#0 g"));
}

TEST(OraclesTest, TopFrame) {
  EXPECT_EQ(TopFrame("Fatal error\n  #0 0x7f12ab in gather_kernel\n#1 0x1 in main\n"),
            "#0 0x? in gather_kernel");
  EXPECT_EQ(TopFrame("Traceback (most recent call last):\n  File \"a.py\", line 3, in <module>\n"
                     "  File \"lib.py\", line 9, in op\nRuntimeError\n"),
            "File \"lib.py\", line 9, in op");
  EXPECT_EQ(TopFrame("plain text\n"), "");
  // Addresses do not split fingerprints.
  EXPECT_EQ(TopFrame("#0 0xabc in f"), TopFrame("#0 0xdef in f"));
}

TEST(OraclesTest, VerdictJsonRoundTrip) {
  for (const auto& c : testing::ClassifyTable()) {
    const Verdict v = Classify(c.outcome);
    EXPECT_EQ(Verdict::FromJson(v.ToJson()), v) << c.name;
  }
  Verdict d;
  d.kind = VerdictKind::kDiffMismatch;
  d.max_delta = std::numeric_limits<double>::infinity();
  EXPECT_EQ(Verdict::FromJson(d.ToJson()), d);
  EXPECT_FALSE(Classify(Exited(0, "ORION::EXC:ValueError\n")).is_finding());
}

}  // namespace
}  // namespace orion
