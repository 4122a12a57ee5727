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

// The value universe manipulated by every other module: tensors described by
// (fill, shape, dtype), scalar arguments, strings, lists and None.
//
// Tensors never carry dense payloads. A fill descriptor is either a constant
// or a seeded uniform range, and code generation expands it at render time.
// Shapes are arbitrary-rank; once mutated they may carry negative or huge
// extents, which serialization preserves verbatim.

#ifndef ORION_VALUE_H_
#define ORION_VALUE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace orion {

using Json = nlohmann::json;

enum class DType {
  kFloat16,
  kFloat32,
  kFloat64,
  kInt8,
  kInt16,
  kInt32,
  kInt64,
  kUInt8,
  kBool,
  kComplex64,
  kString,
};

std::string_view DTypeName(DType dtype);
std::optional<DType> ParseDType(std::string_view name);
// Float and complex kinds: the only ones that can hold NaN.
bool IsFloating(DType dtype);

enum class CornerKind { kLarge, kZero, kNegative, kNaN, kNone, kEmpty, kNonAscii };

inline constexpr CornerKind kAllCornerKinds[] = {
    CornerKind::kLarge, CornerKind::kZero,  CornerKind::kNegative,
    CornerKind::kNaN,   CornerKind::kNone,  CornerKind::kEmpty,
    CornerKind::kNonAscii};

std::string_view CornerKindName(CornerKind kind);
std::optional<CornerKind> ParseCornerKind(std::string_view name);
// The generator family a kind belongs to: case_x, case_n, case_nan,
// case_none, case_mt or case_noa.
std::string_view CornerGenerator(CornerKind kind);

struct NoneValue {
  friend bool operator==(NoneValue, NoneValue) { return true; }
};

using Scalar = std::variant<NoneValue, bool, std::int64_t, double, std::string>;

// NaN compares equal to NaN; everything else is exact.
bool ScalarEquals(const Scalar& a, const Scalar& b);

struct ConstantFill {
  Scalar value;
};

struct UniformFill {
  double lo = 0.0;
  double hi = 1.0;
  std::uint64_t seed = 0;
};

using Fill = std::variant<ConstantFill, UniformFill>;

struct TensorValue {
  Fill fill = ConstantFill{std::int64_t{0}};
  std::vector<std::int64_t> shape;
  DType dtype = DType::kFloat32;

  std::size_t rank() const { return shape.size(); }
  // Product of extents, 0 when any extent is 0. nullopt when an extent is
  // negative or the product overflows 64 bits.
  std::optional<std::uint64_t> element_count() const;
  bool has_constant_fill() const {
    return std::holds_alternative<ConstantFill>(fill);
  }
};

enum class ValueKind { kNone, kTensor, kInt, kReal, kBool, kStr, kList };

std::string_view ValueKindName(ValueKind kind);
std::optional<ValueKind> ParseValueKind(std::string_view name);

class Value {
 public:
  using List = std::vector<Value>;

  Value() = default;

  static Value None() { return Value(); }
  static Value Tensor(TensorValue t) { return Value(std::move(t)); }
  static Value Int(std::int64_t v) { return Value(v); }
  static Value Real(double v) { return Value(v); }
  static Value Bool(bool v) { return Value(v); }
  static Value Str(std::string v) { return Value(std::move(v)); }
  static Value MakeList(List v) { return Value(std::move(v)); }
  static Value FromScalar(const Scalar& s);

  ValueKind kind() const { return static_cast<ValueKind>(data_.index()); }
  bool is(ValueKind k) const { return kind() == k; }

  const TensorValue& tensor() const { return std::get<TensorValue>(data_); }
  TensorValue& tensor() { return std::get<TensorValue>(data_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  double as_real() const { return std::get<double>(data_); }
  bool as_bool() const { return std::get<bool>(data_); }
  const std::string& as_str() const { return std::get<std::string>(data_); }
  const List& list() const { return std::get<List>(data_); }
  List& list() { return std::get<List>(data_); }

  friend bool operator==(const Value& a, const Value& b);

 private:
  template <typename T>
  explicit Value(T v) : data_(std::in_place_type<T>, std::move(v)) {}

  // Alternative order matches ValueKind.
  std::variant<NoneValue, TensorValue, std::int64_t, double, bool, std::string,
               List>
      data_;
};

bool operator==(const TensorValue& a, const TensorValue& b);

struct ParamValue {
  std::string name;
  int position = 0;
  Value value;

  friend bool operator==(const ParamValue& a, const ParamValue& b) {
    return a.name == b.name && a.position == b.position && a.value == b.value;
  }
};

enum class Source { kDocs, kRepos, kDevTests, kSynthetic };

std::string_view SourceName(Source source);
std::optional<Source> ParseSource(std::string_view name);

struct TestInput {
  std::string api_name;
  std::vector<ParamValue> params;
  Source source = Source::kSynthetic;
  std::string record_id;
};

// Magnitudes substituted by the corner-case generators.
struct CornerConfig {
  std::int64_t large_int = std::int64_t{1} << 62;
  double large_real = 1e38;
  std::int64_t large_extent = std::int64_t{1} << 31;
  std::int64_t negative = -(std::int64_t{1} << 31);
  std::string non_ascii = DefaultNonAscii();
  // Extent range and maximum rank used when expanding a scalar tensor.
  std::int64_t nonscalar_min_extent = 2;
  std::int64_t nonscalar_max_extent = 8;
  int nonscalar_max_rank = 3;

  static std::string DefaultNonAscii();
  // Unknown keys are rejected with ConfigError.
  static CornerConfig FromJson(const Json& j);
  Json ToJson() const;
};

std::size_t Rank(const TensorValue& t);

// The concrete value a corner generator yields for an element of `dtype`.
// Throws IllegalKindForType for NaN on non-floating kinds and NonAscii on
// non-string kinds.
Scalar CornerScalar(CornerKind kind, DType dtype, const CornerConfig& config);

// Canonical JSON encoding. Keys are sorted, so the dump is stable and can be
// hashed. Non-finite reals are encoded as "nan", "inf" and "-inf"; strings
// that are not valid UTF-8 are encoded as {"hex": ...}.
Json ValueToJson(const Value& v);
Value ValueFromJson(const Json& j);
Json ParamToJson(const ParamValue& p);
ParamValue ParamFromJson(const Json& j);
Json ScalarToJson(const Scalar& s);
Scalar ScalarFromJson(const Json& j);

std::string SerializeParam(const ParamValue& p);
// Throws SerializationError on malformed bytes or schema violations.
ParamValue DeserializeParam(std::string_view bytes);
// Serializes and parses `p`, returning the parsed copy.
ParamValue ValidateRoundtrip(const ParamValue& p);

// One-line human summary, used in mutation notes and reports.
std::string Describe(const Value& v);

}  // namespace orion

#endif  // ORION_VALUE_H_
