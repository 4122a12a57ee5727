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


#include <csignal>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "orion/errors.h"
#include "orion/executor.h"
#include "orion/sim_target.h"
#include "test_util.h"

namespace orion {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using testing::Param;
using testing::Tensor;

class ExecutorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("orion_exec_" + std::string(
                                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExecutionOutcome Sh(const std::string& command, std::chrono::milliseconds timeout = 10s,
                      std::vector<std::string> env = {"PATH=/usr/bin:/bin"}) {
    return RunSandboxed({"/bin/sh", "-c", command}, dir_, env, timeout, 0);
  }

  fs::path dir_;
};

GeneratedCase MakeCase(const std::string& api, std::vector<ParamValue> params,
                       const std::string& id = "case1") {
  GeneratedCase c;
  c.case_id = id;
  c.api_name = api;
  c.input.api_name = api;
  c.input.params = std::move(params);
  return c;
}

TEST_F(ExecutorTest, SignalTermination) {
  const ExecutionOutcome o = Sh("kill -SEGV $$");
  ASSERT_TRUE(o.signal);
  EXPECT_EQ(*o.signal, SIGSEGV);
  EXPECT_FALSE(o.exit_status);
  EXPECT_FALSE(o.timed_out);
  EXPECT_EQ(Classify(o).kind, VerdictKind::kCrash);
}

TEST_F(ExecutorTest, Timeout) {
  const auto start = std::chrono::steady_clock::now();
  const ExecutionOutcome o = Sh("sleep 30", 300ms);
  EXPECT_TRUE(o.timed_out);
  EXPECT_FALSE(o.exit_status);
  EXPECT_FALSE(o.signal);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
  EXPECT_EQ(Classify(o).kind, VerdictKind::kHang);
}

TEST_F(ExecutorTest, TimeoutKillsBackgroundChildren) {
  const ExecutionOutcome o = Sh("sleep 30 & sleep 30", 300ms);
  EXPECT_TRUE(o.timed_out);
  EXPECT_LT(o.wall_seconds, 5.0);
}

TEST_F(ExecutorTest, MarkersAndExitStatus) {
  const ExecutionOutcome o =
      Sh("echo ORION::OK; echo ORION-OUT-BEGIN; echo '[1.0,2.0]'; echo ORION-OUT-END; "
         "echo oops >&2");
  EXPECT_EQ(o.exit_status, 0);
  EXPECT_EQ(o.markers.verdict, MarkerVerdict::kOk);
  ASSERT_TRUE(o.markers.output_block);
  EXPECT_EQ(*o.markers.output_block, "[1.0,2.0]");
  EXPECT_EQ(o.stderr_bytes, "oops\n");
  EXPECT_EQ(Classify(o).kind, VerdictKind::kBenign);
  EXPECT_EQ(Sh("exit 3").exit_status, 3);
}

TEST_F(ExecutorTest, ExecFailureIsInfraError) {
  const ExecutionOutcome o =
      RunSandboxed({"/nonexistent/runner", "x"}, dir_, {}, 5s, 0);
  EXPECT_TRUE(o.infra_error);
  EXPECT_EQ(Classify(o).kind, VerdictKind::kInfraError);
}

TEST_F(ExecutorTest, EnvironmentIsScrubbedAndCwdIsSet) {
  ::setenv("ORION_TEST_SECRET", "leak", 1);
  const ExecutionOutcome o = Sh("echo \"[$ORION_TEST_SECRET][$KEEP]\"; pwd", 10s,
                                {"PATH=/usr/bin:/bin", "KEEP=yes"});
  EXPECT_NE(o.stdout_bytes.find("[][yes]"), std::string::npos) << o.stdout_bytes;
  EXPECT_NE(o.stdout_bytes.find(fs::canonical(dir_).string()), std::string::npos);
}

TEST_F(ExecutorTest, StdinIsEmpty) {
  const ExecutionOutcome o = Sh("cat; echo done", 5s);
  EXPECT_FALSE(o.timed_out);
  EXPECT_EQ(o.stdout_bytes, "done\n");
}

TEST_F(ExecutorTest, StreamsAreBounded) {
  const ExecutionOutcome o = Sh("head -c 3000000 /dev/zero", 20s);
  EXPECT_LE(o.stdout_bytes.size(), kMaxStreamBytes);
  EXPECT_FALSE(o.timed_out);
}

TEST_F(ExecutorTest, NoNetworkWhenNamespacesAreAvailable) {
  const std::string python = FindExecutable("python3");
  if (python.empty()) GTEST_SKIP() << "python3 not available";
  const ExecutionOutcome o = RunSandboxed(
      {python, "-c",
       "import socket\n"
       "print(sorted(i[1] for i in socket.if_nameindex()))\n"},
      dir_, {"PATH=/usr/bin:/bin"}, 10s, 0);
  ASSERT_EQ(o.exit_status, 0) << o.stderr_bytes;
  // Either only loopback is visible or the host denies new namespaces; in
  // the latter case there is nothing to assert.
  if (o.stdout_bytes.find("'lo']") == std::string::npos)
    GTEST_SKIP() << "network namespace unavailable: " << o.stdout_bytes;
  EXPECT_EQ(o.stdout_bytes, "['lo']\n");
}

TEST_F(ExecutorTest, ScriptedBackendRunsRunnerWithScriptPath) {
  ScriptedOptions opts;
  // The runner prints its last argument and the script's first line.
  opts.runner = {"/bin/sh", "-c",
                 "echo ORION::OK; echo \"$1\" >&2; head -n 1 \"$1\" >&2", "runner"};
  opts.work_dir = dir_ / "work";
  ScriptedBackend backend(opts);
  const ExecutionOutcome o =
      backend.Execute(MakeCase("pkg.f", {Param("x", 0, Value::Int(1))}, "abc"), "cpu");
  EXPECT_EQ(o.exit_status, 0) << o.stderr_bytes;
  EXPECT_EQ(o.markers.verdict, MarkerVerdict::kOk);
  EXPECT_NE(o.stderr_bytes.find((dir_ / "work" / "abc.cpu.script").string()), std::string::npos)
      << o.stderr_bytes;
  EXPECT_NE(o.stderr_bytes.find("# orion case abc"), std::string::npos);
  // Artifacts are removed by default.
  EXPECT_FALSE(fs::exists(dir_ / "work" / "abc.cpu.script"));
  EXPECT_FALSE(fs::exists(dir_ / "work" / "abc.cpu"));
}

TEST_F(ExecutorTest, ScriptedBackendKeepsArtifacts) {
  ScriptedOptions opts;
  opts.runner = {"/bin/sh", "-c", "touch made_here", "runner"};
  opts.work_dir = dir_ / "work";
  opts.keep_artifacts = true;
  ScriptedBackend backend(opts);
  backend.Execute(MakeCase("pkg.f", {}, "k1"), "gpu");
  EXPECT_TRUE(fs::exists(dir_ / "work" / "k1.gpu.script"));
  EXPECT_TRUE(fs::exists(dir_ / "work" / "k1.gpu" / "made_here"));
}

TEST_F(ExecutorTest, ScriptedBackendSignalAndTimeout) {
  ScriptedOptions opts;
  opts.runner = {"/bin/sh", "-c", "kill -ABRT $$", "runner"};
  opts.work_dir = dir_ / "work";
  EXPECT_EQ(ScriptedBackend(opts).Execute(MakeCase("f", {}), "cpu").signal, SIGABRT);
  opts.runner = {"/bin/sh", "-c", "sleep 20", "runner"};
  opts.timeout = 200ms;
  EXPECT_TRUE(ScriptedBackend(opts).Execute(MakeCase("f", {}), "cpu").timed_out);
}

TEST_F(ExecutorTest, MissingRunnerThrows) {
  ScriptedOptions opts;
  opts.runner = {"definitely-not-a-runner-binary"};
  opts.work_dir = dir_ / "work";
  EXPECT_THROW(ScriptedBackend{opts}, InfraError);
}

TEST_F(ExecutorTest, SimulatedBackendFaults) {
  SimulatedBackend backend(sim::Catalog::Default());
  const auto segv = backend.Execute(
      MakeCase("sim.lu_unpack", {Param("LU_data", 0, Value::Tensor(Tensor({3, 3, 3}))),
                                 Param("LU_pivots", 1, Value::Tensor(Tensor({3})))}),
      "cpu");
  EXPECT_EQ(segv.signal, SIGSEGV);
  EXPECT_EQ(TopFrame(segv.stderr_bytes), "#0 sim::r1_lu_unpack");
  const auto hang = backend.Execute(
      MakeCase("sim.broadcast_shapes", {Param("shape_a", 0, testing::IntList({2, 3})),
                                        Param("shape_b", 1, testing::IntList({2, 3, 1}))}),
      "cpu");
  EXPECT_TRUE(hang.timed_out);
  for (const TraceRecord& seed : backend.catalog().SeedCatalog()) {
    const auto ok = backend.Execute(MakeCase(seed.api, seed.params), "cpu");
    EXPECT_EQ(ok.exit_status, 0);
    EXPECT_EQ(ok.markers.verdict, MarkerVerdict::kOk);
    EXPECT_TRUE(ok.markers.output_block);
  }
  const auto unknown = backend.Execute(MakeCase("sim.nothing", {}), "cpu");
  EXPECT_EQ(Classify(unknown).kind, VerdictKind::kInfraError);
}

// A stand-in for the target package following the python-mock profile.
constexpr char kMockModule[] = R"PY(
import os
import signal

_device = "cpu"


def set_device(d):
    global _device
    _device = d


def full(shape, value, dtype=None):
    if not shape:
        return value
    return [full(shape[1:], value, dtype) for _ in range(shape[0])]


def uniform(shape, lo, hi, seed=0, dtype=None):
    return full(shape, (lo + hi) / 2, dtype)


def add(x, y):
    return [a + b for a, b in zip(x, y)]


def scale(x, factor):
    if not isinstance(factor, (int, float)):
        raise ValueError("factor must be numeric")
    if factor > 2 ** 40:
        os.kill(os.getpid(), signal.SIGSEGV)
    if factor < 0:
        raise RuntimeError("negative factor")
    return [v * factor for v in x]


def where():
    return _device
)PY";

class PythonMockTest : public ExecutorTest {
 protected:
  void SetUp() override {
    ExecutorTest::SetUp();
    python_ = FindExecutable("python3");
    if (python_.empty()) GTEST_SKIP() << "python3 not available";
    fs::create_directories(dir_ / "lib" / "orion_mock");
    std::ofstream(dir_ / "lib" / "orion_mock" / "__init__.py") << kMockModule;
    ScriptedOptions opts;
    opts.runner = {"python3"};
    opts.work_dir = dir_ / "work";
    opts.timeout = 20s;
    opts.extra_env = {{"PYTHONPATH", (dir_ / "lib").string()}};
    backend_ = std::make_unique<ScriptedBackend>(opts);
  }

  Verdict RunScale(Value factor, const std::string& device = "cpu") {
    const GeneratedCase c =
        MakeCase("orion_mock.scale", {Param("x", 0, Value::Tensor(Tensor({3}, 2.0))),
                                      Param("factor", 1, std::move(factor))});
    const ExecutionOutcome o = backend_->Execute(c, device);
    last_ = o;
    return Classify(o, backend_->filtered_exceptions());
  }

  std::string python_;
  std::unique_ptr<ScriptedBackend> backend_;
  ExecutionOutcome last_;
};

TEST_F(PythonMockTest, BenignOutputIsCaptured) {
  EXPECT_EQ(RunScale(Value::Int(3)).kind, VerdictKind::kBenign) << last_.stderr_bytes;
  ASSERT_TRUE(last_.markers.output_block);
  const OutputSummary s = OutputSummary::Parse(*last_.markers.output_block);
  EXPECT_EQ(s.values, (std::vector<double>{6.0, 6.0, 6.0}));
  EXPECT_EQ(s.shape, std::vector<std::int64_t>{3});
}

TEST_F(PythonMockTest, VerdictClasses) {
  EXPECT_EQ(RunScale(Value::Str("x")).kind, VerdictKind::kInvalidInput);
  const Verdict runtime = RunScale(Value::Int(-1));
  EXPECT_EQ(runtime.kind, VerdictKind::kCrash);
  EXPECT_EQ(runtime.detail, "runtime-error");
  EXPECT_EQ(runtime.exception, "RuntimeError");
  const Verdict segv = RunScale(Value::Int(std::int64_t{1} << 62));
  EXPECT_EQ(segv.kind, VerdictKind::kCrash);
  EXPECT_EQ(segv.signal, SIGSEGV);
}

TEST_F(PythonMockTest, DevicesAgreeOnBenignCase) {
  RunScale(Value::Real(1.5), "A");
  const ExecutionOutcome a = last_;
  RunScale(Value::Real(1.5), "B");
  EXPECT_EQ(Differential(a, last_, Tolerance{}).kind, VerdictKind::kBenign);
}

TEST_F(PythonMockTest, MissingApiIsInfraError) {
  const ExecutionOutcome o = backend_->Execute(MakeCase("orion_mock.nothing", {}), "cpu");
  EXPECT_EQ(Classify(o).kind, VerdictKind::kInfraError) << o.stderr_bytes;
}

}  // namespace
}  // namespace orion
