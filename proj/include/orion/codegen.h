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

// Test case rendering and the marker protocol.
//
// A rendered script builds every parameter in order, selects the device,
// calls the API inside an exception handler and reports on stdout:
//
//   ORION::OK                  call returned
//   ORION::EXC:<TypeName>      call raised
//   ORION-OUT-BEGIN
//   <one-line JSON output summary>
//   ORION-OUT-END
//
// A process that dies before printing a verdict line leaves no marker, which
// the oracles treat as evidence of abnormal termination. The grammar is a
// frozen wire format shared with the runner shim.

#ifndef ORION_CODEGEN_H_
#define ORION_CODEGEN_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "orion/case.h"
#include "orion/value.h"

namespace orion {

inline constexpr std::string_view kVerdictPrefix = "ORION::";
inline constexpr std::string_view kOutBegin = "ORION-OUT-BEGIN";
inline constexpr std::string_view kOutEnd = "ORION-OUT-END";

// Bounded result summary: enough for differential comparison.
struct OutputSummary {
  std::vector<std::int64_t> shape;
  std::string dtype;
  // Element count of the full result.
  std::uint64_t count = 0;
  // At most kMaxSummaryValues leading elements.
  std::vector<double> values;
  std::optional<double> checksum;

  static constexpr std::size_t kMaxSummaryValues = 64;

  // One-line JSON. Non-finite numbers are written as "nan"/"inf"/"-inf".
  std::string ToLine() const;
  // Accepts the object form or a bare array of numbers. Throws
  // IncomparableOutputs.
  static OutputSummary Parse(std::string_view block);
};

enum class MarkerVerdict { kOk, kException, kNoMarker };

struct MarkerParse {
  MarkerVerdict verdict = MarkerVerdict::kNoMarker;
  std::string exception;  // Set for kException.
  std::optional<std::string> output_block;
};

// Extracts the last verdict line and the last complete output block. Total.
MarkerParse ParseMarkers(std::string_view stdout_bytes);

// Writes the stdout a well-behaved runner would produce.
std::string FormatMarkers(const MarkerParse& m);

struct TargetProfile {
  std::string name;
  std::string module;
  // Templates use {placeholders}; "{{" and "}}" are literal braces.
  std::string preamble;         // {module}
  std::string tensor_constant;  // {module} {shape} {value} {dtype}
  std::string tensor_uniform;   // {module} {shape} {lo} {hi} {seed} {dtype}
  std::string device_select;    // {module} {device}
  std::map<std::string, std::string> devices;  // label -> {device} expression
  std::map<std::string, std::string> dtypes;   // dtype name -> expression
  std::string none_literal = "None";
  std::string true_literal = "True";
  std::string false_literal = "False";
  std::string nan_literal = "float('nan')";
  std::string inf_literal = "float('inf')";
  bool keyword_args = true;
  std::set<std::string> filtered_exceptions = {"ValueError",
                                               "InvalidArgumentError"};

  // Convention of the mock target package: full/uniform/set_device.
  static TargetProfile PythonMock();
  static TargetProfile PyTorch();
  static TargetProfile TensorFlow();
  // Throws ConfigError for unknown names.
  static TargetProfile Builtin(std::string_view name);
  // Starts from the named builtin ("base", default python-mock) and
  // overrides the given fields. Unknown keys throw ConfigError.
  static TargetProfile FromJson(const Json& j);
  Json ToJson() const;
};

struct RenderedCase {
  std::string case_id;
  std::string device;
  std::string script;
};

// Deterministic: equal inputs give byte-identical scripts. Throws
// UnrenderableParam naming the value kind (or dtype) the profile cannot
// express.
RenderedCase Render(const GeneratedCase& c, const TargetProfile& profile,
                    const std::string& device);

// A Python literal for the byte string: a str literal when the bytes are
// valid UTF-8, otherwise a bytes literal. Injective.
std::string PythonStringLiteral(std::string_view bytes);

}  // namespace orion

#endif  // ORION_CODEGEN_H_
