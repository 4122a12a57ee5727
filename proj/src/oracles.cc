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

#include "orion/oracles.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <csignal>
#include <limits>
#include <regex>

#include "orion/errors.h"
#include "orion/rng.h"

namespace orion {
namespace {

constexpr std::array<std::string_view, 6> kVerdictNames = {
    "crash", "invalid-input", "hang", "benign", "diff-mismatch", "infra-error"};

constexpr std::string_view kTraceback = "Traceback (most recent call last)";

Verdict Make(VerdictKind kind, std::string detail = {}) {
  Verdict v;
  v.kind = kind;
  v.detail = std::move(detail);
  return v;
}

// Absolute difference where NaN matches NaN and equal infinities match.
double Delta(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return 0.0;
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::infinity();
  if (a == b) return 0.0;
  return std::fabs(a - b);
}

bool Within(double a, double b, const Tolerance& tol, double* delta) {
  *delta = Delta(a, b);
  if (*delta == 0.0) return true;
  if (!std::isfinite(*delta)) return false;
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return *delta <= std::max(tol.abs, tol.rel * scale);
}

std::vector<std::string_view> Lines(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) nl = s.size();
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view VerdictKindName(VerdictKind kind) {
  return kVerdictNames[static_cast<std::size_t>(kind)];
}

std::optional<VerdictKind> ParseVerdictKind(std::string_view name) {
  for (std::size_t i = 0; i < kVerdictNames.size(); ++i)
    if (kVerdictNames[i] == name) return static_cast<VerdictKind>(i);
  return std::nullopt;
}

std::string SignalName(int signal) {
  switch (signal) {
    case SIGSEGV:
      return "SIGSEGV";
    case SIGABRT:
      return "SIGABRT";
    case SIGBUS:
      return "SIGBUS";
    case SIGFPE:
      return "SIGFPE";
    case SIGILL:
      return "SIGILL";
    case SIGKILL:
      return "SIGKILL";
    case SIGTERM:
      return "SIGTERM";
    default:
      return "SIG" + std::to_string(signal);
  }
}

Json ExecutionOutcome::ToJson() const {
  Json j{{"case_id", case_id},
         {"device", device},
         {"timed_out", timed_out},
         {"infra_error", infra_error},
         {"wall_seconds", wall_seconds},
         {"stdout", stdout_bytes},
         {"stderr", stderr_bytes}};
  j["exit_status"] = exit_status ? Json(*exit_status) : Json(nullptr);
  j["signal"] = signal ? Json(*signal) : Json(nullptr);
  return j;
}

Json Verdict::ToJson() const {
  Json j{{"kind", VerdictKindName(kind)}, {"detail", detail}, {"exception", exception}};
  j["signal"] = signal ? Json(*signal) : Json(nullptr);
  if (kind == VerdictKind::kDiffMismatch)
    j["max_delta"] = std::isfinite(max_delta) ? Json(max_delta) : Json("inf");
  return j;
}

Verdict Verdict::FromJson(const Json& j) {
  try {
    Verdict v;
    const auto kind = ParseVerdictKind(j.at("kind").get<std::string>());
    if (!kind) throw SerializationError("unknown verdict kind");
    v.kind = *kind;
    v.detail = j.value("detail", "");
    v.exception = j.value("exception", "");
    if (auto it = j.find("signal"); it != j.end() && !it->is_null()) v.signal = it->get<int>();
    if (auto it = j.find("max_delta"); it != j.end()) {
      v.max_delta = it->is_string() ? std::numeric_limits<double>::infinity()
                                    : it->get<double>();
    }
    return v;
  } catch (const Json::exception& e) {
    throw SerializationError(std::string("bad verdict: ") + e.what());
  }
}

Verdict Classify(const ExecutionOutcome& o, const std::set<std::string>& filtered) {
  if (o.infra_error) return Make(VerdictKind::kInfraError, "spawn-failed");
  if (o.timed_out) return Make(VerdictKind::kHang, "timeout");
  if (o.signal) {
    Verdict v = Make(VerdictKind::kCrash, "signal");
    v.signal = *o.signal;
    return v;
  }
  const int status = o.exit_status.value_or(0);
  switch (o.markers.verdict) {
    case MarkerVerdict::kException: {
      Verdict v = filtered.count(o.markers.exception)
                      ? Make(VerdictKind::kInvalidInput)
                      : Make(VerdictKind::kCrash, "runtime-error");
      v.exception = o.markers.exception;
      return v;
    }
    case MarkerVerdict::kOk:
      if (status == 0) return Make(VerdictKind::kBenign);
      return Make(VerdictKind::kCrash, "abnormal-exit");
    case MarkerVerdict::kNoMarker:
      break;
  }
  if (status != 0 && o.stderr_bytes.find(kTraceback) != std::string::npos)
    return Make(VerdictKind::kInfraError, "harness-error");
  return Make(VerdictKind::kCrash, status != 0 ? "abnormal-exit" : "no-marker");
}

Verdict CompareSummaries(const OutputSummary& a, const OutputSummary& b,
                         const Tolerance& tol) {
  Verdict v = Make(VerdictKind::kBenign);
  auto mismatch = [&](std::string detail, double delta) {
    v.kind = VerdictKind::kDiffMismatch;
    if (v.detail.empty()) v.detail = std::move(detail);
    v.max_delta = std::max(v.max_delta, delta);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.shape != b.shape) mismatch("shape", kInf);
  if (a.dtype != b.dtype) mismatch("dtype", kInf);
  if (a.count != b.count || a.values.size() != b.values.size()) mismatch("count", kInf);
  const std::size_t n = std::min(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < n; ++i) {
    double d;
    if (!Within(a.values[i], b.values[i], tol, &d)) mismatch("values", d);
  }
  if (a.checksum.has_value() != b.checksum.has_value()) {
    mismatch("checksum", kInf);
  } else if (a.checksum) {
    double d;
    if (!Within(*a.checksum, *b.checksum, tol, &d)) mismatch("checksum", d);
  }
  return v;
}

Verdict Differential(const ExecutionOutcome& a, const ExecutionOutcome& b,
                     const Tolerance& tol) {
  if (!a.markers.output_block || !b.markers.output_block)
    throw IncomparableOutputs("differential needs an output block from both runs");
  return CompareSummaries(OutputSummary::Parse(*a.markers.output_block),
                          OutputSummary::Parse(*b.markers.output_block), tol);
}

std::string TopFrame(std::string_view stderr_bytes) {
  static const std::regex kHex("0x[0-9a-fA-F]+");
  std::string frame;
  for (std::string_view line : Lines(stderr_bytes)) {
    const std::string_view t = Trim(line);
    if (t.rfind("#0", 0) == 0) {
      frame = std::string(t);
      break;
    }
    if (t.rfind("File \"", 0) == 0) frame = std::string(t);
  }
  return std::regex_replace(frame, kHex, "0x?");
}

std::string Fingerprint(std::string_view api, const Verdict& verdict,
                        std::string_view top_frame) {
  KeyBuilder k(0);
  k.Add(api).Add(VerdictKindName(verdict.kind));
  if (verdict.signal) {
    k.Add(SignalName(*verdict.signal));
  } else {
    k.Add(verdict.exception);
  }
  k.Add(top_frame);
  return HexDigest(k.key());
}

}  // namespace orion
