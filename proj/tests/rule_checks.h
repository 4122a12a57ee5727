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


// Randomized inputs and independent post-condition checks for the mutation
// rules. Shared by the rule unit tests and the acceptance binary.

#ifndef ORION_TESTS_RULE_CHECKS_H_
#define ORION_TESTS_RULE_CHECKS_H_

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "orion/rng.h"
#include "orion/rules.h"
#include "orion/value.h"

namespace orion::testing {

struct RuleInput {
  std::vector<ParamValue> params;
  RuleTarget target;
};

inline DType AnyDType(Rng& rng) {
  static constexpr DType kTypes[] = {DType::kFloat16, DType::kFloat32, DType::kFloat64,
                                     DType::kInt8,    DType::kInt16,   DType::kInt32,
                                     DType::kInt64,   DType::kUInt8,   DType::kBool,
                                     DType::kComplex64};
  return kTypes[rng.Below(std::size(kTypes))];
}

inline TensorValue AnyTensor(Rng& rng, std::uint64_t max_rank = 4) {
  TensorValue t;
  const std::uint64_t rank = rng.Below(max_rank + 1);
  for (std::uint64_t i = 0; i < rank; ++i) t.shape.push_back(rng.Range(0, 9));
  t.dtype = AnyDType(rng);
  if (rng.Coin()) {
    t.fill = ConstantFill{static_cast<std::int64_t>(rng.Range(-5, 5))};
  } else {
    t.fill = UniformFill{0.0, 1.0, rng()};
  }
  return t;
}

inline Value::List AnyIntList(Rng& rng, std::uint64_t max_len = 5) {
  Value::List out;
  const std::uint64_t n = rng.Below(max_len + 1);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(Value::Int(rng.Range(-3, 9)));
  return out;
}

inline Value::List AnyList(Rng& rng) {
  Value::List out;
  const std::uint64_t n = rng.Below(5);
  for (std::uint64_t i = 0; i < n; ++i) {
    switch (rng.Below(3)) {
      case 0:
        out.push_back(Value::Int(rng.Range(-3, 9)));
        break;
      case 1:
        out.push_back(Value::Real(rng.Unit()));
        break;
      default:
        out.push_back(Value::Bool(rng.Coin()));
    }
  }
  return out;
}

inline std::string AnyString(Rng& rng) {
  std::string s;
  const std::uint64_t n = rng.Below(6);
  for (std::uint64_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng.Below(26)));
  return s;
}

// A random parameter list the rule applies to, padded with an unrelated
// leading parameter half of the time so targets are not always 0 and 1.
inline RuleInput RandomRuleInput(RuleId rule, Rng& rng) {
  RuleInput in;
  if (rng.Coin()) in.params.push_back({"pad", 0, Value::Str("pad")});
  auto add = [&](Value v) {
    const auto pos = static_cast<int>(in.params.size());
    in.params.push_back({"arg" + std::to_string(pos), pos, std::move(v)});
    return in.params.size() - 1;
  };
  switch (rule) {
    case RuleId::kR1:
      in.target.first = add(Value::Tensor(AnyTensor(rng)));
      in.target.second = add(Value::Tensor(AnyTensor(rng)));
      break;
    case RuleId::kR2:
      in.target.first = add(Value::Tensor(AnyTensor(rng)));
      in.target.second = add(Value::Int(rng.Range(-2, 9)));
      break;
    case RuleId::kR3:
      in.target.first = add(Value::Tensor(AnyTensor(rng)));
      in.target.second = add(Value::MakeList(AnyList(rng)));
      break;
    case RuleId::kR4:
      in.target.first = add(Value::Tensor(AnyTensor(rng)));
      in.target.second = add(Value::MakeList(AnyIntList(rng)));
      break;
    case RuleId::kR5:
      in.target.first = add(Value::MakeList(AnyList(rng)));
      in.target.second = add(Value::MakeList(AnyList(rng)));
      break;
    case RuleId::kR6:
    case RuleId::kR9:
    case RuleId::kR10:
      in.target.first = add(Value::Tensor(AnyTensor(rng)));
      break;
    case RuleId::kR7:
    case RuleId::kR8: {
      TensorValue t = AnyTensor(rng);
      if (t.shape.empty()) t.shape.push_back(rng.Range(0, 9));
      in.target.first = add(Value::Tensor(std::move(t)));
      break;
    }
    case RuleId::kR11:
      in.target.first =
          add(rng.Coin() ? Value::Int(rng.Range(-9, 9)) : Value::Real(rng.Unit() * 10));
      break;
    case RuleId::kR12:
      in.target.first = add(Value::Bool(rng.Coin()));
      break;
    case RuleId::kR13:
      in.target.first = add(Value::Str(AnyString(rng)));
      break;
    case RuleId::kR14:
      in.target.first = add(Value::MakeList(AnyList(rng)));
      break;
  }
  if (rng.Coin()) {
    const auto pos = static_cast<int>(in.params.size());
    in.params.push_back({"tail", pos, Value::None()});
  }
  return in;
}

inline std::optional<CornerKind> NoteKind(const MutationNote& note) {
  const std::string prefix = "kind=";
  if (note.detail.rfind(prefix, 0) != 0) return std::nullopt;
  return ParseCornerKind(note.detail.substr(prefix.size()));
}

// The value a numeric corner kind must produce, computed from the config.
inline Value ExpectedNumericCorner(bool real, CornerKind kind, const CornerConfig& c) {
  switch (kind) {
    case CornerKind::kLarge:
      return real ? Value::Real(c.large_real) : Value::Int(c.large_int);
    case CornerKind::kZero:
      return real ? Value::Real(0.0) : Value::Int(0);
    case CornerKind::kNegative:
      return real ? Value::Real(static_cast<double>(c.negative)) : Value::Int(c.negative);
    case CornerKind::kNaN:
      return Value::Real(std::nan(""));
    case CornerKind::kNone:
      return Value::None();
    case CornerKind::kEmpty:
      return Value::Str("");
    case CornerKind::kNonAscii:
      return Value::Str(c.non_ascii);
  }
  return Value::None();
}

inline bool IsFloatDType(DType d) {
  return d == DType::kFloat16 || d == DType::kFloat32 || d == DType::kFloat64 ||
         d == DType::kComplex64;
}

// Values a valid index or dimension argument may take for `t`.
inline std::set<std::int64_t> ValidIndexSet(const TensorValue& t) {
  std::set<std::int64_t> valid;
  for (std::int64_t i = 0; i <= static_cast<std::int64_t>(t.shape.size()); ++i) valid.insert(i);
  valid.insert(t.shape.begin(), t.shape.end());
  return valid;
}

// Empty when every post-condition of `rule` holds for in -> out.
inline std::string CheckPostCondition(RuleId rule, const RuleInput& in, const Mutation& m,
                                      const CornerConfig& config) {
  const std::size_t a = in.target.first;
  if (m.params.size() != in.params.size()) return "arity changed";
  for (std::size_t i = 0; i < in.params.size(); ++i) {
    if (m.params[i].name != in.params[i].name ||
        m.params[i].position != in.params[i].position)
      return "names changed";
    const bool touched = i == a || (in.target.second && i == *in.target.second);
    if (!touched && !(m.params[i] == in.params[i])) return "untargeted param changed";
  }
  if (m.note.rule != rule) return "note names the wrong rule";
  const Value& before = in.params[a].value;
  const Value& after = m.params[a].value;
  const Value* after2 = in.target.second ? &m.params[*in.target.second].value : nullptr;
  const auto kind = NoteKind(m.note);

  switch (rule) {
    case RuleId::kR1:
      if (after.tensor().shape == after2->tensor().shape) return "shapes equal";
      if (after.tensor().dtype != before.tensor().dtype) return "dtype changed";
      return {};
    case RuleId::kR2: {
      const std::int64_t v = after2->as_int();
      if (ValidIndexSet(before.tensor()).count(v)) return "dimension inside valid set";
      if (!(after == before)) return "tensor changed";
      return {};
    }
    case RuleId::kR3:
      if (after2->list().size() == before.tensor().rank()) return "list length equals rank";
      return {};
    case RuleId::kR4: {
      const auto valid = ValidIndexSet(before.tensor());
      bool outside = false;
      for (const Value& e : after2->list())
        if (e.is(ValueKind::kInt) && !valid.count(e.as_int())) outside = true;
      if (!outside) return "no element outside the valid set";
      return {};
    }
    case RuleId::kR5:
      if (after.list().size() == after2->list().size()) return "lengths equal";
      return {};
    case RuleId::kR6: {
      if (!kind) return "missing kind";
      const TensorValue& t0 = before.tensor();
      const TensorValue& t1 = after.tensor();
      if (t0.shape != t1.shape || t0.dtype != t1.dtype) return "shape or dtype changed";
      if (*kind == CornerKind::kNaN && !IsFloatDType(t0.dtype)) return "NaN on integer dtype";
      const auto* fill = std::get_if<ConstantFill>(&t1.fill);
      if (!fill) return "fill not constant";
      const Value expected = ExpectedNumericCorner(IsFloatDType(t0.dtype), *kind, config);
      if (!(Value::FromScalar(fill->value) == expected)) return "fill is not the corner value";
      return {};
    }
    case RuleId::kR7:
    case RuleId::kR8: {
      if (!kind) return "missing kind";
      std::int64_t extent = 0;
      if (*kind == CornerKind::kLarge) extent = config.large_extent;
      else if (*kind == CornerKind::kNegative) extent = config.negative;
      else if (*kind != CornerKind::kZero) return "unexpected kind";
      std::vector<std::int64_t> expected = before.tensor().shape;
      (rule == RuleId::kR7 ? expected.front() : expected.back()) = extent;
      if (after.tensor().shape != expected) return "extent not substituted";
      return {};
    }
    case RuleId::kR9: {
      TensorValue expected = before.tensor();
      expected.shape.clear();
      if (!(after.tensor() == expected)) return "not a scalar of the same fill";
      return {};
    }
    case RuleId::kR10: {
      const auto& shape = after.tensor().shape;
      if (shape.size() < 2) return "rank below 2";
      for (std::int64_t e : shape)
        if (e < config.nonscalar_min_extent || e > config.nonscalar_max_extent)
          return "extent out of range";
      return {};
    }
    case RuleId::kR11:
      if (!kind) return "missing kind";
      if (!(after == ExpectedNumericCorner(before.is(ValueKind::kReal), *kind, config)))
        return "not the corner value";
      return {};
    case RuleId::kR12:
      if (kind == CornerKind::kLarge && after == Value::Int(config.large_int)) return {};
      if (kind == CornerKind::kNegative && after == Value::Int(config.negative)) return {};
      return "not a large or negative integer";
    case RuleId::kR13:
      if (kind == CornerKind::kEmpty && after == Value::Str("")) return {};
      if (kind == CornerKind::kNonAscii && after == Value::Str(config.non_ascii)) return {};
      return "not an empty or non-ASCII string";
    case RuleId::kR14: {
      if (!kind) return "missing kind";
      const auto& l0 = before.list();
      const auto& l1 = after.list();
      if (*kind == CornerKind::kEmpty) return l1.empty() ? "" : "list not emptied";
      if (l0.size() != l1.size()) return "length changed";
      std::size_t replaced = 0, differing = 0;
      for (std::size_t i = 0; i < l0.size(); ++i) {
        if (l0[i] == l1[i]) continue;
        ++differing;
        const bool real = l0[i].is(ValueKind::kReal);
        if (l1[i] == ExpectedNumericCorner(real, *kind, config)) ++replaced;
      }
      // An element that already held the corner value may look untouched.
      bool already = false;
      for (std::size_t i = 0; i < l0.size(); ++i)
        if (l1[i] == ExpectedNumericCorner(l0[i].is(ValueKind::kReal), *kind, config))
          already = true;
      if (differing > 1) return "more than one element changed";
      if (replaced == 0 && !already) return "no element holds the corner value";
      return {};
    }
  }
  return "unknown rule";
}

}  // namespace orion::testing

#endif  // ORION_TESTS_RULE_CHECKS_H_
