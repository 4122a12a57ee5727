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

// Execution backends. Both are safe to call from many threads at once.

#ifndef ORION_EXECUTOR_H_
#define ORION_EXECUTOR_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "orion/case.h"
#include "orion/codegen.h"
#include "orion/oracles.h"
#include "orion/sim_target.h"

namespace orion {

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  // Exceptions raised by the case itself never escape; they are part of
  // the outcome.
  virtual ExecutionOutcome Execute(const GeneratedCase& c, const std::string& device) = 0;
  // Exception names the oracle treats as invalid input.
  virtual const std::set<std::string>& filtered_exceptions() const {
    return DefaultFilteredExceptions();
  }
};

// Dispatches to the simulated target in-process and synthesizes the stdout
// and stderr a runner would have produced. Faults map to SIGSEGV, SIGABRT
// or a timeout; the fault site appears as the "#0" stderr frame.
class SimulatedBackend : public Backend {
 public:
  explicit SimulatedBackend(sim::Catalog catalog) : catalog_(std::move(catalog)) {}

  std::string name() const override { return "simulated"; }
  ExecutionOutcome Execute(const GeneratedCase& c, const std::string& device) override;

  const sim::Catalog& catalog() const { return catalog_; }

 private:
  sim::Catalog catalog_;
};

struct ScriptedOptions {
  // Runner command; the script path is appended as the last argument.
  std::vector<std::string> runner = {"python3"};
  TargetProfile profile = TargetProfile::PythonMock();
  std::filesystem::path work_dir = "work";
  std::chrono::milliseconds timeout{30000};
  // Address-space cap for the child in MiB; 0 disables it.
  std::uint64_t address_space_mb = 8192;
  bool keep_artifacts = false;
  // Environment variables passed through; everything else is dropped.
  std::vector<std::string> env_allowlist = {"PATH", "PYTHONPATH", "HOME", "LANG",
                                            "LC_ALL", "TMPDIR"};
  // Variables set in the child regardless of the parent environment.
  std::vector<std::pair<std::string, std::string>> extra_env;
};

// Renders each case and runs `<runner...> <script-path>` in a fresh process
// group with its own working directory, no core dumps, an address-space
// cap, and (where the kernel allows unprivileged namespaces) no network.
class ScriptedBackend : public Backend {
 public:
  // Throws InfraError when the runner cannot be found or the work
  // directory cannot be created.
  explicit ScriptedBackend(ScriptedOptions options);

  std::string name() const override { return "scripted"; }
  ExecutionOutcome Execute(const GeneratedCase& c, const std::string& device) override;
  const std::set<std::string>& filtered_exceptions() const override {
    return options_.profile.filtered_exceptions;
  }

  const ScriptedOptions& options() const { return options_; }

 private:
  ScriptedOptions options_;
  std::string runner_path_;
};

// Runs argv (argv[0] is an absolute path) under the scripted sandbox and
// collects its outcome. Exposed for the backend tests.
ExecutionOutcome RunSandboxed(const std::vector<std::string>& argv,
                              const std::filesystem::path& cwd,
                              const std::vector<std::string>& env,
                              std::chrono::milliseconds timeout,
                              std::uint64_t address_space_mb);

// Resolves a command name against PATH; empty when not found.
std::string FindExecutable(const std::string& name);

}  // namespace orion

#endif  // ORION_EXECUTOR_H_
