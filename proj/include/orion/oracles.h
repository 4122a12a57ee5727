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

// Execution outcomes and the crash and differential oracles.

#ifndef ORION_ORACLES_H_
#define ORION_ORACLES_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "orion/codegen.h"
#include "orion/value.h"

namespace orion {

struct ExecutionOutcome {
  std::string case_id;
  std::string device;
  // Exactly one of exit_status, signal and timed_out explains termination.
  std::optional<int> exit_status;
  std::optional<int> signal;
  bool timed_out = false;
  // The case never ran: the runner could not be spawned or exec'd.
  bool infra_error = false;
  std::string stdout_bytes;
  std::string stderr_bytes;
  double wall_seconds = 0.0;
  MarkerParse markers;

  Json ToJson() const;
};

// Output streams are truncated to this many bytes each.
inline constexpr std::size_t kMaxStreamBytes = 1 << 20;

enum class VerdictKind { kCrash, kInvalidInput, kHang, kBenign, kDiffMismatch, kInfraError };

std::string_view VerdictKindName(VerdictKind kind);
std::optional<VerdictKind> ParseVerdictKind(std::string_view name);

struct Verdict {
  VerdictKind kind = VerdictKind::kBenign;
  // Crash: "signal", "runtime-error", "abnormal-exit" or "no-marker".
  // InfraError: a short reason.
  std::string detail;
  std::optional<int> signal;
  // Exception type for InvalidInput and runtime-error crashes.
  std::string exception;
  // DiffMismatch only.
  double max_delta = 0.0;

  bool is_finding() const {
    return kind == VerdictKind::kCrash || kind == VerdictKind::kHang ||
           kind == VerdictKind::kDiffMismatch;
  }
  Json ToJson() const;
  static Verdict FromJson(const Json& j);
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

inline const std::set<std::string>& DefaultFilteredExceptions() {
  static const std::set<std::string> kFiltered = {"ValueError", "InvalidArgumentError"};
  return kFiltered;
}

// Total and deterministic. Checked in order: infra error, timeout, signal,
// exception marker, OK marker, missing marker. A missing marker with a
// Python traceback and non-zero exit is a harness failure (InfraError);
// any other missing marker is a crash.
Verdict Classify(const ExecutionOutcome& outcome,
                 const std::set<std::string>& filtered = DefaultFilteredExceptions());

struct Tolerance {
  double rel = 1e-6;
  double abs = 1e-9;
};

// Compares two output summaries. Shapes and dtypes must match exactly;
// elements and checksums must agree within max(abs, rel * max(|a|, |b|)),
// with NaN equal to NaN. Symmetric in its arguments.
Verdict CompareSummaries(const OutputSummary& a, const OutputSummary& b,
                         const Tolerance& tol);

// Differential oracle over two Benign outcomes. Throws IncomparableOutputs
// when either output block is missing or malformed.
Verdict Differential(const ExecutionOutcome& a, const ExecutionOutcome& b,
                     const Tolerance& tol);

// First stderr line starting with "#0", else the last Python frame line,
// with hex addresses blanked. Empty when neither exists.
std::string TopFrame(std::string_view stderr_bytes);

// Stable hash of (api, verdict class, signal or exception, top frame).
std::string Fingerprint(std::string_view api, const Verdict& verdict,
                        std::string_view top_frame);

std::string SignalName(int signal);

}  // namespace orion

#endif  // ORION_ORACLES_H_
