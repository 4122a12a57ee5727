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

#include "orion/value.h"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "orion/errors.h"

namespace orion {
namespace {

constexpr std::array<std::pair<DType, std::string_view>, 11> kDTypeNames = {{
    {DType::kFloat16, "float16"},
    {DType::kFloat32, "float32"},
    {DType::kFloat64, "float64"},
    {DType::kInt8, "int8"},
    {DType::kInt16, "int16"},
    {DType::kInt32, "int32"},
    {DType::kInt64, "int64"},
    {DType::kUInt8, "uint8"},
    {DType::kBool, "bool"},
    {DType::kComplex64, "complex64"},
    {DType::kString, "string"},
}};

constexpr std::array<std::string_view, 7> kCornerNames = {
    "large", "zero", "negative", "nan", "none", "empty", "non_ascii"};

constexpr std::array<std::string_view, 7> kValueKindNames = {
    "none", "tensor", "int", "real", "bool", "str", "list"};

constexpr std::array<std::pair<Source, std::string_view>, 4> kSourceNames = {{
    {Source::kDocs, "docs"},
    {Source::kRepos, "repos"},
    {Source::kDevTests, "dev-tests"},
    {Source::kSynthetic, "synthetic"},
}};

bool RealEquals(double a, double b) {
  return a == b || (std::isnan(a) && std::isnan(b));
}

bool IsValidUtf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    // Reject overlong forms, surrogates and out-of-range code points.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10ffff ||
        (cp >= 0xd800 && cp <= 0xdfff))
      return false;
    i += extra + 1;
  }
  return true;
}

std::string ToHex(std::string_view s) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(s.size() * 2);
  for (unsigned char c : s) {
    out.push_back(kDigits[c >> 4]);
    out.push_back(kDigits[c & 0xf]);
  }
  return out;
}

std::string FromHex(std::string_view s) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw SerializationError("bad hex digit");
  };
  if (s.size() % 2 != 0) throw SerializationError("odd-length hex string");
  std::string out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i < s.size(); i += 2)
    out.push_back(static_cast<char>(nibble(s[i]) << 4 | nibble(s[i + 1])));
  return out;
}

Json RealToJson(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double RealFromJson(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw SerializationError("expected real, got " + j.dump());
}

std::int64_t IntFromJson(const Json& j) {
  if (j.is_number_integer()) {
    if (j.is_number_unsigned() &&
        j.get<std::uint64_t>() >
            static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      throw SerializationError("integer out of int64 range");
    return j.get<std::int64_t>();
  }
  throw SerializationError("expected integer, got " + j.dump());
}

void StrToJson(const std::string& s, Json& out) {
  if (IsValidUtf8(s))
    out["value"] = s;
  else
    out["hex"] = ToHex(s);
}

std::string StrFromJson(const Json& j) {
  if (auto it = j.find("value"); it != j.end() && it->is_string())
    return it->get<std::string>();
  if (auto it = j.find("hex"); it != j.end() && it->is_string())
    return FromHex(it->get_ref<const std::string&>());
  throw SerializationError("string payload missing");
}

const Json& Field(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw SerializationError(std::string("missing field '") + key + "'");
  return *it;
}

Json FillToJson(const Fill& fill) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantFill>) {
          return Json{{"const", ScalarToJson(f.value)}};
        } else {
          return Json{{"uniform", Json::array({RealToJson(f.lo), RealToJson(f.hi)})},
                      {"seed", f.seed}};
        }
      },
      fill);
}

Fill FillFromJson(const Json& j) {
  if (!j.is_object()) throw SerializationError("fill must be an object");
  if (auto it = j.find("const"); it != j.end())
    return ConstantFill{ScalarFromJson(*it)};
  if (auto it = j.find("uniform"); it != j.end()) {
    if (!it->is_array() || it->size() != 2)
      throw SerializationError("uniform fill needs [lo, hi]");
    UniformFill u;
    u.lo = RealFromJson((*it)[0]);
    u.hi = RealFromJson((*it)[1]);
    const Json& seed = Field(j, "seed");
    if (!seed.is_number_integer()) throw SerializationError("bad fill seed");
    u.seed = seed.get<std::uint64_t>();
    return u;
  }
  throw SerializationError("fill must be const or uniform");
}

std::string FormatReal(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string DescribeScalar(const Scalar& s) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoneValue>) {
          return "None";
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? "True" : "False";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return FormatReal(x);
        } else {
          return Json(IsValidUtf8(x) ? x : "0x" + ToHex(x)).dump();
        }
      },
      s);
}

}  // namespace

std::string_view DTypeName(DType dtype) {
  for (const auto& [d, name] : kDTypeNames)
    if (d == dtype) return name;
  return "?";
}

std::optional<DType> ParseDType(std::string_view name) {
  for (const auto& [d, n] : kDTypeNames)
    if (n == name) return d;
  return std::nullopt;
}

bool IsFloating(DType dtype) {
  switch (dtype) {
    case DType::kFloat16:
    case DType::kFloat32:
    case DType::kFloat64:
    case DType::kComplex64:
      return true;
    default:
      return false;
  }
}

std::string_view CornerKindName(CornerKind kind) {
  return kCornerNames[static_cast<std::size_t>(kind)];
}

std::optional<CornerKind> ParseCornerKind(std::string_view name) {
  for (std::size_t i = 0; i < kCornerNames.size(); ++i)
    if (kCornerNames[i] == name) return static_cast<CornerKind>(i);
  return std::nullopt;
}

std::string_view CornerGenerator(CornerKind kind) {
  switch (kind) {
    case CornerKind::kLarge:
    case CornerKind::kZero:
      return "case_x";
    case CornerKind::kNegative:
      return "case_n";
    case CornerKind::kNaN:
      return "case_nan";
    case CornerKind::kNone:
      return "case_none";
    case CornerKind::kEmpty:
      return "case_mt";
    case CornerKind::kNonAscii:
      return "case_noa";
  }
  return "?";
}

bool ScalarEquals(const Scalar& a, const Scalar& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<double>(&a))
    return RealEquals(*x, std::get<double>(b));
  return a == b;
}

std::optional<std::uint64_t> TensorValue::element_count() const {
  std::uint64_t n = 1;
  bool zero = false;
  bool overflow = false;
  for (std::int64_t e : shape) {
    if (e < 0) return std::nullopt;
    if (e == 0) zero = true;
    if (!overflow && __builtin_mul_overflow(n, static_cast<std::uint64_t>(e), &n))
      overflow = true;
  }
  if (zero) return 0;
  if (overflow) return std::nullopt;
  return n;
}

std::string_view ValueKindName(ValueKind kind) {
  return kValueKindNames[static_cast<std::size_t>(kind)];
}

std::optional<ValueKind> ParseValueKind(std::string_view name) {
  for (std::size_t i = 0; i < kValueKindNames.size(); ++i)
    if (kValueKindNames[i] == name) return static_cast<ValueKind>(i);
  return std::nullopt;
}

Value Value::FromScalar(const Scalar& s) {
  return std::visit([](const auto& x) { return Value(x); }, s);
}

bool operator==(const TensorValue& a, const TensorValue& b) {
  if (a.dtype != b.dtype || a.shape != b.shape) return false;
  if (a.fill.index() != b.fill.index()) return false;
  if (const auto* c = std::get_if<ConstantFill>(&a.fill))
    return ScalarEquals(c->value, std::get<ConstantFill>(b.fill).value);
  const auto& ua = std::get<UniformFill>(a.fill);
  const auto& ub = std::get<UniformFill>(b.fill);
  return RealEquals(ua.lo, ub.lo) && RealEquals(ua.hi, ub.hi) &&
         ua.seed == ub.seed;
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::kNone:
      return true;
    case ValueKind::kTensor:
      return a.tensor() == b.tensor();
    case ValueKind::kInt:
      return a.as_int() == b.as_int();
    case ValueKind::kReal:
      return RealEquals(a.as_real(), b.as_real());
    case ValueKind::kBool:
      return a.as_bool() == b.as_bool();
    case ValueKind::kStr:
      return a.as_str() == b.as_str();
    case ValueKind::kList:
      return a.list() == b.list();
  }
  return false;
}

std::string_view SourceName(Source source) {
  for (const auto& [s, name] : kSourceNames)
    if (s == source) return name;
  return "?";
}

std::optional<Source> ParseSource(std::string_view name) {
  for (const auto& [s, n] : kSourceNames)
    if (n == name) return s;
  return std::nullopt;
}

std::string CornerConfig::DefaultNonAscii() {
  std::string out;
  for (int i = 0; i < 8; ++i) out += "\xF0\x9F\x98\x80";  // U+1F600
  return out;
}

CornerConfig CornerConfig::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("corner config must be an object");
  CornerConfig c;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "large_int") {
        c.large_int = v.get<std::int64_t>();
      } else if (key == "large_real") {
        c.large_real = v.get<double>();
      } else if (key == "large_extent") {
        c.large_extent = v.get<std::int64_t>();
      } else if (key == "negative") {
        c.negative = v.get<std::int64_t>();
      } else if (key == "non_ascii") {
        c.non_ascii = v.get<std::string>();
      } else if (key == "nonscalar_min_extent") {
        c.nonscalar_min_extent = v.get<std::int64_t>();
      } else if (key == "nonscalar_max_extent") {
        c.nonscalar_max_extent = v.get<std::int64_t>();
      } else if (key == "nonscalar_max_rank") {
        c.nonscalar_max_rank = v.get<int>();
      } else {
        throw ConfigError("unknown corner config key: " + key);
      }
    } catch (const Json::exception& e) {
      throw ConfigError("corner config key " + key + ": " + e.what());
    }
  }
  if (c.nonscalar_min_extent < 0 ||
      c.nonscalar_max_extent < c.nonscalar_min_extent ||
      c.nonscalar_max_rank < 2)
    throw ConfigError("invalid non-scalar expansion range");
  return c;
}

Json CornerConfig::ToJson() const {
  return Json{{"large_int", large_int},
              {"large_real", large_real},
              {"large_extent", large_extent},
              {"negative", negative},
              {"non_ascii", non_ascii},
              {"nonscalar_min_extent", nonscalar_min_extent},
              {"nonscalar_max_extent", nonscalar_max_extent},
              {"nonscalar_max_rank", nonscalar_max_rank}};
}

std::size_t Rank(const TensorValue& t) { return t.rank(); }

Scalar CornerScalar(CornerKind kind, DType dtype, const CornerConfig& config) {
  const bool floating = IsFloating(dtype);
  switch (kind) {
    case CornerKind::kLarge:
      if (floating) return config.large_real;
      return config.large_int;
    case CornerKind::kZero:
      if (floating) return 0.0;
      return std::int64_t{0};
    case CornerKind::kNegative:
      if (floating) return static_cast<double>(config.negative);
      return config.negative;
    case CornerKind::kNaN:
      if (!floating)
        throw IllegalKindForType("NaN is not representable in " +
                                 std::string(DTypeName(dtype)));
      return std::numeric_limits<double>::quiet_NaN();
    case CornerKind::kNone:
      return NoneValue{};
    case CornerKind::kEmpty:
      return std::string();
    case CornerKind::kNonAscii:
      if (dtype != DType::kString)
        throw IllegalKindForType("non-ASCII value requires a string dtype, got " +
                                 std::string(DTypeName(dtype)));
      return config.non_ascii;
  }
  throw IllegalKindForType("unknown corner kind");
}

Json ScalarToJson(const Scalar& s) { return ValueToJson(Value::FromScalar(s)); }

Scalar ScalarFromJson(const Json& j) {
  Value v = ValueFromJson(j);
  switch (v.kind()) {
    case ValueKind::kNone:
      return NoneValue{};
    case ValueKind::kInt:
      return v.as_int();
    case ValueKind::kReal:
      return v.as_real();
    case ValueKind::kBool:
      return v.as_bool();
    case ValueKind::kStr:
      return v.as_str();
    default:
      throw SerializationError("fill constant must be a scalar");
  }
}

Json ValueToJson(const Value& v) {
  Json j = Json::object();
  j["kind"] = ValueKindName(v.kind());
  switch (v.kind()) {
    case ValueKind::kNone:
      break;
    case ValueKind::kTensor: {
      const TensorValue& t = v.tensor();
      j["fill"] = FillToJson(t.fill);
      j["shape"] = t.shape;
      j["dtype"] = DTypeName(t.dtype);
      break;
    }
    case ValueKind::kInt:
      j["value"] = v.as_int();
      break;
    case ValueKind::kReal:
      j["value"] = RealToJson(v.as_real());
      break;
    case ValueKind::kBool:
      j["value"] = v.as_bool();
      break;
    case ValueKind::kStr:
      StrToJson(v.as_str(), j);
      break;
    case ValueKind::kList: {
      Json items = Json::array();
      for (const Value& e : v.list()) items.push_back(ValueToJson(e));
      j["items"] = std::move(items);
      break;
    }
  }
  return j;
}

Value ValueFromJson(const Json& j) {
  if (!j.is_object()) throw SerializationError("value must be an object");
  const Json& kind_json = Field(j, "kind");
  if (!kind_json.is_string()) throw SerializationError("kind must be a string");
  const auto kind = ParseValueKind(kind_json.get_ref<const std::string&>());
  if (!kind)
    throw SerializationError("unknown kind: " + kind_json.get<std::string>());
  switch (*kind) {
    case ValueKind::kNone:
      return Value::None();
    case ValueKind::kTensor: {
      TensorValue t;
      t.fill = FillFromJson(Field(j, "fill"));
      const Json& shape = Field(j, "shape");
      if (!shape.is_array()) throw SerializationError("shape must be an array");
      for (const Json& e : shape) t.shape.push_back(IntFromJson(e));
      const Json& dtype = Field(j, "dtype");
      if (!dtype.is_string()) throw SerializationError("dtype must be a string");
      const auto d = ParseDType(dtype.get_ref<const std::string&>());
      if (!d) throw SerializationError("unknown dtype: " + dtype.get<std::string>());
      t.dtype = *d;
      return Value::Tensor(std::move(t));
    }
    case ValueKind::kInt:
      return Value::Int(IntFromJson(Field(j, "value")));
    case ValueKind::kReal:
      return Value::Real(RealFromJson(Field(j, "value")));
    case ValueKind::kBool: {
      const Json& b = Field(j, "value");
      if (!b.is_boolean()) throw SerializationError("expected boolean");
      return Value::Bool(b.get<bool>());
    }
    case ValueKind::kStr:
      return Value::Str(StrFromJson(j));
    case ValueKind::kList: {
      const Json& items = Field(j, "items");
      if (!items.is_array()) throw SerializationError("items must be an array");
      Value::List out;
      out.reserve(items.size());
      for (const Json& e : items) out.push_back(ValueFromJson(e));
      return Value::MakeList(std::move(out));
    }
  }
  throw SerializationError("unreachable kind");
}

Json ParamToJson(const ParamValue& p) {
  Json j = ValueToJson(p.value);
  j["name"] = p.name;
  j["pos"] = p.position;
  return j;
}

ParamValue ParamFromJson(const Json& j) {
  ParamValue p;
  p.value = ValueFromJson(j);
  const Json& name = Field(j, "name");
  if (!name.is_string()) throw SerializationError("name must be a string");
  p.name = name.get<std::string>();
  const Json& pos = Field(j, "pos");
  if (!pos.is_number_integer()) throw SerializationError("pos must be an integer");
  p.position = pos.get<int>();
  return p;
}

std::string SerializeParam(const ParamValue& p) { return ParamToJson(p).dump(); }

ParamValue DeserializeParam(std::string_view bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const Json::parse_error& e) {
    throw SerializationError(e.what());
  }
  return ParamFromJson(j);
}

ParamValue ValidateRoundtrip(const ParamValue& p) {
  return DeserializeParam(SerializeParam(p));
}

std::string Describe(const Value& v) {
  switch (v.kind()) {
    case ValueKind::kNone:
      return "None";
    case ValueKind::kTensor: {
      const TensorValue& t = v.tensor();
      std::string out = "tensor<" + std::string(DTypeName(t.dtype)) + ">[";
      for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(t.shape[i]);
      }
      out += "]";
      if (const auto* c = std::get_if<ConstantFill>(&t.fill)) {
        out += " fill=" + DescribeScalar(c->value);
      } else {
        const auto& u = std::get<UniformFill>(t.fill);
        out += " uniform(" + FormatReal(u.lo) + "," + FormatReal(u.hi) + ")";
      }
      return out;
    }
    case ValueKind::kInt:
      return std::to_string(v.as_int());
    case ValueKind::kReal:
      return FormatReal(v.as_real());
    case ValueKind::kBool:
      return v.as_bool() ? "True" : "False";
    case ValueKind::kStr:
      return DescribeScalar(v.as_str());
    case ValueKind::kList: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.list().size(); ++i) {
        if (i) out += ",";
        out += Describe(v.list()[i]);
      }
      return out + "]";
    }
  }
  return "?";
}

}  // namespace orion
