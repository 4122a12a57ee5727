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

#include "orion/rules.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "orion/errors.h"

namespace orion {
namespace {

using K = ValueKind;
using C = CornerKind;

const std::vector<RuleInfo>& Catalog() {
  static const std::vector<RuleInfo> kCatalog = {
      {RuleId::kR1, RuleCategory::kGuided, "Tensors Shape Mismatch",
       {K::kTensor, K::kTensor}, {},
       "Rank-reduce one tensor and rank-expand the other so their shapes differ."},
      {RuleId::kR2, RuleCategory::kGuided, "Tensor Dimension Mismatch",
       {K::kTensor, K::kInt}, {},
       "Replace a dimension argument with an integer outside the tensor's rank "
       "and extents."},
      {RuleId::kR3, RuleCategory::kGuided, "Tensor List-Indices Mismatch",
       {K::kTensor, K::kList}, {},
       "Resize an index list so its length differs from the tensor rank."},
      {RuleId::kR4, RuleCategory::kGuided, "List Indices Elements Mismatch",
       {K::kTensor, K::kList}, {},
       "Replace an index-list element with a value outside the tensor's "
       "extents."},
      {RuleId::kR5, RuleCategory::kGuided, "List Indices Length Mismatch",
       {K::kList, K::kList}, {},
       "Grow or shrink one of two lists so their lengths differ."},
      {RuleId::kR6, RuleCategory::kCornerCase,
       "Tensor Corner Case Generator Type 1", {K::kTensor},
       {C::kLarge, C::kZero, C::kNegative, C::kNaN},
       "Replace the tensor fill with a large, zero, negative or NaN value."},
      {RuleId::kR7, RuleCategory::kCornerCase,
       "Tensor Corner Case Generator Type 2", {K::kTensor},
       {C::kLarge, C::kNegative, C::kZero},
       "Replace the first shape extent with a large, negative or zero extent."},
      {RuleId::kR8, RuleCategory::kCornerCase,
       "Tensor Corner Case Generator Type 3", {K::kTensor},
       {C::kLarge, C::kNegative, C::kZero},
       "Replace the last shape extent with a large, negative or zero extent."},
      {RuleId::kR9, RuleCategory::kCornerCase,
       "Scalar Tensor Corner Case Generator", {K::kTensor}, {},
       "Collapse the tensor to a rank-0 scalar."},
      {RuleId::kR10, RuleCategory::kCornerCase,
       "Non-Scalar Tensor Corner Case Generator", {K::kTensor}, {},
       "Expand the tensor to a random shape of rank two or more."},
      {RuleId::kR11, RuleCategory::kCornerCase,
       "Preemptive Corner Case Generator Type 1", {K::kInt},
       {C::kLarge, C::kZero, C::kNegative, C::kNaN, C::kNone, C::kEmpty,
        C::kNonAscii},
       "Replace a numeric argument with any corner value."},
      {RuleId::kR12, RuleCategory::kCornerCase,
       "Preemptive Corner Case Generator Type 2", {K::kBool},
       {C::kLarge, C::kNegative},
       "Replace a boolean argument with a large or negative integer."},
      {RuleId::kR13, RuleCategory::kCornerCase,
       "Preemptive Corner Case Generator Type 3", {K::kStr},
       {C::kEmpty, C::kNonAscii},
       "Replace a string argument with an empty or non-ASCII string."},
      {RuleId::kR14, RuleCategory::kCornerCase,
       "List/Tuple Corner Case Generator", {K::kList},
       {C::kLarge, C::kZero, C::kNegative, C::kNaN, C::kNone, C::kEmpty,
        C::kNonAscii},
       "Replace a list element with a corner value, or empty the list."},
  };
  return kCatalog;
}

// Element appended when a list has to grow.
Value FillerLike(const Value::List& list) {
  if (list.empty() || list.back().is(K::kInt)) return Value::Int(0);
  if (list.back().is(K::kReal)) return Value::Real(0.0);
  return list.back();
}

void ResizeList(Value::List& list, std::size_t length) {
  while (list.size() > length) list.pop_back();
  while (list.size() < length) list.push_back(FillerLike(list));
}

void ApplyShapeOp(ShapeOp op, std::vector<std::int64_t>& shape) {
  if (op == ShapeOp::kExpand) {
    shape.push_back(1);
    shape.back() += 1;
  } else if (!shape.empty()) {
    shape.pop_back();
  }
}

void PerturbShape(std::vector<std::int64_t>& shape) {
  if (shape.empty()) {
    shape.push_back(1);
  } else if (shape.back() == std::numeric_limits<std::int64_t>::max()) {
    shape.back() -= 1;
  } else {
    shape.back() += 1;
  }
}

CornerKind PickKind(const std::vector<CornerKind>& kinds, Rng& rng) {
  return kinds[rng.Below(kinds.size())];
}

const ParamValue& At(std::span<const ParamValue> params, std::size_t i) {
  if (i >= params.size())
    throw NotApplicable("target index " + std::to_string(i) + " out of range");
  return params[i];
}

void Require(const ParamValue& p, ValueKind kind, RuleId rule) {
  if (!p.value.is(kind))
    throw NotApplicable(RuleName(rule) + " needs a " +
                        std::string(ValueKindName(kind)) + " at '" + p.name +
                        "', got " + std::string(ValueKindName(p.value.kind())));
}

bool IsNumeric(const Value& v) { return v.is(K::kInt) || v.is(K::kReal); }

}  // namespace

std::string RuleName(RuleId id) {
  return "R" + std::to_string(static_cast<int>(id));
}

std::optional<RuleId> ParseRuleId(std::string_view name) {
  if (name.size() < 2 || (name[0] != 'R' && name[0] != 'r')) return std::nullopt;
  int n = 0;
  for (char c : name.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + (c - '0');
    if (n > 14) return std::nullopt;
  }
  if (n < 1) return std::nullopt;
  return static_cast<RuleId>(n);
}

std::string_view CategoryName(RuleCategory c) {
  return c == RuleCategory::kGuided ? "guided" : "corner";
}

const RuleInfo& GetRuleInfo(RuleId id) {
  return Catalog()[static_cast<std::size_t>(id) - 1];
}

Json RuleCatalogJson(std::optional<RuleCategory> category) {
  Json rows = Json::array();
  for (const RuleInfo& info : Catalog()) {
    if (category && info.category != *category) continue;
    Json applicability = Json::array();
    for (ValueKind k : info.signature) {
      // R11 also accepts reals; the table is keyed by Int and Real alike.
      if (info.id == RuleId::kR11) {
        applicability = {"int|real"};
        break;
      }
      applicability.push_back(ValueKindName(k));
    }
    Json kinds = Json::array();
    for (CornerKind k : info.corner_kinds) kinds.push_back(CornerKindName(k));
    rows.push_back({{"id", RuleName(info.id)},
                    {"title", info.title},
                    {"category", CategoryName(info.category)},
                    {"applicability", applicability},
                    {"corner_kinds", kinds},
                    {"description", info.description}});
  }
  return rows;
}

// ---- Typed mutators -------------------------------------------------------

std::pair<TensorValue, TensorValue> ShapeMismatch(const TensorValue& a,
                                                  const TensorValue& b,
                                                  Rng& rng, ShapeOp* first_op) {
  const ShapeOp op = rng.Coin() ? ShapeOp::kExpand : ShapeOp::kReduce;
  const ShapeOp opposite = op == ShapeOp::kExpand ? ShapeOp::kReduce : ShapeOp::kExpand;
  if (first_op) *first_op = op;
  TensorValue out_a = a;
  TensorValue out_b = b;
  ApplyShapeOp(op, out_a.shape);
  ApplyShapeOp(opposite, out_b.shape);
  if (out_a.shape == out_b.shape) PerturbShape(out_b.shape);
  return {std::move(out_a), std::move(out_b)};
}

std::int64_t OutOfRangeIndex(const TensorValue& t, Rng& rng) {
  constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();
  constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
  std::int64_t hi = static_cast<std::int64_t>(t.rank());
  std::int64_t lo = 0;
  for (std::int64_t e : t.shape) {
    hi = std::max(hi, e);
    lo = std::min(lo, e);
  }
  if (hi <= kMax - 16) return hi + 2 + static_cast<std::int64_t>(rng.Below(8));
  if (lo >= kMin + 16) return lo - 2 - static_cast<std::int64_t>(rng.Below(8));
  // Both ends saturated: the extents are absurd, probe for a free value.
  for (;;) {
    const auto v = static_cast<std::int64_t>(rng());
    if (v > static_cast<std::int64_t>(t.rank()) || v < 0) {
      if (std::find(t.shape.begin(), t.shape.end(), v) == t.shape.end()) return v;
    }
  }
}

std::int64_t DimMismatch(const TensorValue& t, std::int64_t /*arg*/, Rng& rng) {
  return OutOfRangeIndex(t, rng);
}

Value::List ListIndicesMismatch(const TensorValue& t, const Value::List& list,
                                Rng& rng) {
  const std::size_t rank = t.rank();
  const bool shrink = rank > 0 && rng.Coin();
  Value::List out = list;
  ResizeList(out, shrink ? rank - 1 : rank + 1);
  return out;
}

Value::List ListElemMismatch(const TensorValue& t, const Value::List& list,
                             Rng& rng) {
  for (const Value& v : list)
    if (!v.is(K::kInt))
      throw NotApplicable("R4 needs a list of integers");
  Value::List out = list;
  const std::int64_t bad = OutOfRangeIndex(t, rng);
  if (out.empty()) {
    out.push_back(Value::Int(bad));
  } else {
    out[rng.Below(out.size())] = Value::Int(bad);
  }
  return out;
}

std::pair<Value::List, Value::List> ListLenMismatch(const Value::List& a,
                                                    const Value::List& b,
                                                    Rng& rng) {
  Value::List out_a = a;
  Value::List out_b = b;
  const bool pick_first = rng.Coin();
  Value::List& target = pick_first ? out_a : out_b;
  const bool grow = target.empty() || rng.Coin();
  ResizeList(target, grow ? target.size() + 1 : target.size() - 1);
  if (out_a.size() == out_b.size()) ResizeList(target, target.size() + 1);
  return {std::move(out_a), std::move(out_b)};
}

TensorValue TensorValueCorner(const TensorValue& t, CornerKind kind,
                              const CornerConfig& config) {
  switch (kind) {
    case C::kLarge:
    case C::kZero:
    case C::kNegative:
    case C::kNaN:
      break;
    default:
      throw IllegalKindForType("R6 does not generate " +
                               std::string(CornerKindName(kind)));
  }
  TensorValue out = t;
  out.fill = ConstantFill{CornerScalar(kind, t.dtype, config)};
  return out;
}

TensorValue TensorShapeCorner(const TensorValue& t, Axis axis, CornerKind kind,
                              const CornerConfig& config) {
  if (t.rank() == 0) throw NotApplicable("shape corner needs rank >= 1");
  std::int64_t extent;
  switch (kind) {
    case C::kLarge:
      extent = config.large_extent;
      break;
    case C::kNegative:
      extent = config.negative;
      break;
    case C::kZero:
      extent = 0;
      break;
    default:
      throw IllegalKindForType("shape corner does not generate " +
                               std::string(CornerKindName(kind)));
  }
  TensorValue out = t;
  (axis == Axis::kFirst ? out.shape.front() : out.shape.back()) = extent;
  return out;
}

TensorValue ToScalar(const TensorValue& t) {
  TensorValue out = t;
  out.shape.clear();
  return out;
}

TensorValue FromScalar(const TensorValue& t, Rng& rng,
                       const CornerConfig& config) {
  TensorValue out = t;
  const auto rank = rng.Range(2, config.nonscalar_max_rank);
  out.shape.clear();
  for (std::int64_t i = 0; i < rank; ++i)
    out.shape.push_back(
        rng.Range(config.nonscalar_min_extent, config.nonscalar_max_extent));
  return out;
}

Value NumericArgCorner(const Value& arg, CornerKind kind,
                       const CornerConfig& config) {
  if (!IsNumeric(arg)) throw NotApplicable("R11 needs an int or real argument");
  const bool real = arg.is(K::kReal);
  switch (kind) {
    case C::kLarge:
      return real ? Value::Real(config.large_real) : Value::Int(config.large_int);
    case C::kZero:
      return real ? Value::Real(0.0) : Value::Int(0);
    case C::kNegative:
      return real ? Value::Real(static_cast<double>(config.negative))
                  : Value::Int(config.negative);
    case C::kNaN:
      return Value::Real(std::numeric_limits<double>::quiet_NaN());
    case C::kNone:
      return Value::None();
    case C::kEmpty:
      return Value::Str("");
    case C::kNonAscii:
      return Value::Str(config.non_ascii);
  }
  throw IllegalKindForType("unknown corner kind");
}

Value BoolArgCorner(const Value& arg, CornerKind kind,
                    const CornerConfig& config) {
  if (!arg.is(K::kBool)) throw NotApplicable("R12 needs a bool argument");
  if (kind == C::kLarge) return Value::Int(config.large_int);
  if (kind == C::kNegative) return Value::Int(config.negative);
  throw IllegalKindForType("R12 does not generate " +
                           std::string(CornerKindName(kind)));
}

Value StringArgCorner(const Value& arg, CornerKind kind,
                      const CornerConfig& config) {
  if (!arg.is(K::kStr)) throw NotApplicable("R13 needs a string argument");
  if (kind == C::kEmpty) return Value::Str("");
  if (kind == C::kNonAscii) return Value::Str(config.non_ascii);
  throw IllegalKindForType("R13 does not generate " +
                           std::string(CornerKindName(kind)));
}

Value::List ListCorner(const Value::List& list, CornerKind kind, Rng& rng,
                       const CornerConfig& config) {
  if (kind == C::kEmpty) return {};
  if (list.empty()) throw NotApplicable("R14 cannot replace in an empty list");
  Value::List out = list;
  const std::size_t i = rng.Below(out.size());
  // Numeric corners keep the element's numeric type where it has one.
  if (IsNumeric(out[i])) {
    out[i] = NumericArgCorner(out[i], kind, config);
  } else {
    out[i] = NumericArgCorner(Value::Int(0), kind, config);
  }
  return out;
}

// ---- Rule application -----------------------------------------------------

RuleTarget MutationNote::target() const {
  RuleTarget t;
  if (!affected.empty()) t.first = affected[0];
  if (affected.size() > 1) t.second = affected[1];
  return t;
}

Json MutationNote::ToJson() const {
  return Json{{"rule", RuleName(rule)}, {"affected", affected},
              {"before", before},       {"after", after},
              {"seed", seed},           {"detail", detail}};
}

MutationNote MutationNote::FromJson(const Json& j) {
  MutationNote n;
  const auto rule = ParseRuleId(j.at("rule").get<std::string>());
  if (!rule) throw SerializationError("bad rule id in note");
  n.rule = *rule;
  n.affected = j.at("affected").get<std::vector<std::size_t>>();
  n.before = j.at("before").get<std::vector<std::string>>();
  n.after = j.at("after").get<std::vector<std::string>>();
  n.seed = j.at("seed").get<std::uint64_t>();
  n.detail = j.at("detail").get<std::string>();
  return n;
}

Mutation ApplyRule(RuleId rule, std::span<const ParamValue> params,
                   const RuleTarget& target, std::uint64_t seed,
                   const CornerConfig& config) {
  const RuleInfo& info = GetRuleInfo(rule);
  Rng rng(seed);
  Mutation m;
  m.params.assign(params.begin(), params.end());
  m.note.rule = rule;
  m.note.seed = seed;
  m.note.affected.push_back(target.first);
  if (info.pairwise()) {
    if (!target.second) throw NotApplicable(RuleName(rule) + " needs two targets");
    if (*target.second == target.first)
      throw NotApplicable(RuleName(rule) + " needs two distinct targets");
    m.note.affected.push_back(*target.second);
  }
  for (std::size_t i : m.note.affected)
    m.note.before.push_back(Describe(At(params, i).value));

  Value& first = m.params[target.first].value;
  const ParamValue& p0 = params[target.first];
  switch (rule) {
    case RuleId::kR1: {
      const ParamValue& p1 = params[*target.second];
      Require(p0, K::kTensor, rule);
      Require(p1, K::kTensor, rule);
      ShapeOp op;
      auto [a, b] = ShapeMismatch(p0.value.tensor(), p1.value.tensor(), rng, &op);
      first = Value::Tensor(std::move(a));
      m.params[*target.second].value = Value::Tensor(std::move(b));
      m.note.detail = op == ShapeOp::kExpand ? "first=expand" : "first=reduce";
      break;
    }
    case RuleId::kR2: {
      const ParamValue& p1 = params[*target.second];
      Require(p0, K::kTensor, rule);
      Require(p1, K::kInt, rule);
      m.params[*target.second].value =
          Value::Int(DimMismatch(p0.value.tensor(), p1.value.as_int(), rng));
      break;
    }
    case RuleId::kR3:
    case RuleId::kR4: {
      const ParamValue& p1 = params[*target.second];
      Require(p0, K::kTensor, rule);
      Require(p1, K::kList, rule);
      m.params[*target.second].value = Value::MakeList(
          rule == RuleId::kR3
              ? ListIndicesMismatch(p0.value.tensor(), p1.value.list(), rng)
              : ListElemMismatch(p0.value.tensor(), p1.value.list(), rng));
      break;
    }
    case RuleId::kR5: {
      const ParamValue& p1 = params[*target.second];
      Require(p0, K::kList, rule);
      Require(p1, K::kList, rule);
      auto [a, b] = ListLenMismatch(p0.value.list(), p1.value.list(), rng);
      first = Value::MakeList(std::move(a));
      m.params[*target.second].value = Value::MakeList(std::move(b));
      break;
    }
    case RuleId::kR6: {
      Require(p0, K::kTensor, rule);
      std::vector<CornerKind> kinds;
      for (CornerKind k : info.corner_kinds)
        if (k != C::kNaN || IsFloating(p0.value.tensor().dtype)) kinds.push_back(k);
      const CornerKind kind = PickKind(kinds, rng);
      first = Value::Tensor(TensorValueCorner(p0.value.tensor(), kind, config));
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
    case RuleId::kR7:
    case RuleId::kR8: {
      Require(p0, K::kTensor, rule);
      if (p0.value.tensor().rank() == 0)
        throw NotApplicable(RuleName(rule) + " needs rank >= 1");
      const CornerKind kind = PickKind(info.corner_kinds, rng);
      first = Value::Tensor(TensorShapeCorner(
          p0.value.tensor(), rule == RuleId::kR7 ? Axis::kFirst : Axis::kLast,
          kind, config));
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
    case RuleId::kR9:
      Require(p0, K::kTensor, rule);
      first = Value::Tensor(ToScalar(p0.value.tensor()));
      break;
    case RuleId::kR10:
      Require(p0, K::kTensor, rule);
      first = Value::Tensor(FromScalar(p0.value.tensor(), rng, config));
      break;
    case RuleId::kR11: {
      if (!IsNumeric(p0.value))
        throw NotApplicable("R11 needs an int or real at '" + p0.name + "'");
      const CornerKind kind = PickKind(info.corner_kinds, rng);
      first = NumericArgCorner(p0.value, kind, config);
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
    case RuleId::kR12: {
      Require(p0, K::kBool, rule);
      const CornerKind kind = PickKind(info.corner_kinds, rng);
      first = BoolArgCorner(p0.value, kind, config);
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
    case RuleId::kR13: {
      Require(p0, K::kStr, rule);
      const CornerKind kind = PickKind(info.corner_kinds, rng);
      first = StringArgCorner(p0.value, kind, config);
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
    case RuleId::kR14: {
      Require(p0, K::kList, rule);
      const CornerKind kind = p0.value.list().empty()
                                  ? C::kEmpty
                                  : PickKind(info.corner_kinds, rng);
      first = Value::MakeList(ListCorner(p0.value.list(), kind, rng, config));
      m.note.detail = "kind=" + std::string(CornerKindName(kind));
      break;
    }
  }
  for (std::size_t i : m.note.affected)
    m.note.after.push_back(Describe(m.params[i].value));
  return m;
}

Mutation Replay(const MutationNote& note, std::span<const ParamValue> params,
                const CornerConfig& config) {
  return ApplyRule(note.rule, params, note.target(), note.seed, config);
}

// ---- Lookup tables --------------------------------------------------------

RuleTable::RuleTable() : RuleTable(std::set<RuleId>(kAllRules.begin(), kAllRules.end())) {}

RuleTable::RuleTable(const std::set<RuleId>& enabled) {
  auto idx = [](ValueKind k) { return static_cast<std::size_t>(k); };
  for (RuleId id : kAllRules) {
    if (!enabled.count(id)) continue;
    const RuleInfo& info = GetRuleInfo(id);
    if (info.pairwise()) {
      pairwise_[idx(info.signature[0])][idx(info.signature[1])].push_back(id);
    } else if (id == RuleId::kR11) {
      unary_[idx(K::kInt)].push_back(id);
      unary_[idx(K::kReal)].push_back(id);
    } else {
      unary_[idx(info.signature[0])].push_back(id);
    }
  }
}

const std::vector<RuleId>& RuleTable::Unary(ValueKind kind) const {
  return unary_[static_cast<std::size_t>(kind)];
}

const std::vector<RuleId>& RuleTable::Pairwise(ValueKind first,
                                               ValueKind second) const {
  return pairwise_[static_cast<std::size_t>(first)][static_cast<std::size_t>(second)];
}

std::vector<RuleId> RuleTable::RulesFor(std::span<const ValueKind> signature) const {
  std::set<RuleId> out;
  for (ValueKind k : signature)
    for (RuleId id : Unary(k)) out.insert(id);
  for (std::size_t a = 0; a < kKinds; ++a) {
    for (std::size_t b = 0; b < kKinds; ++b) {
      for (RuleId id : pairwise_[a][b])
        if (!PairTargets(id, signature).empty()) out.insert(id);
    }
  }
  return {out.begin(), out.end()};
}

std::vector<RuleTarget> RuleTable::PairTargets(RuleId rule,
                                               std::span<const ValueKind> signature) {
  const RuleInfo& info = GetRuleInfo(rule);
  std::vector<RuleTarget> out;
  if (!info.pairwise()) return out;
  const ValueKind first = info.signature[0];
  const ValueKind second = info.signature[1];
  if (first == second) {
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < signature.size(); ++i) {
      if (signature[i] != first) continue;
      if (prev) out.push_back({*prev, i});
      prev = i;
    }
    return out;
  }
  for (std::size_t i = 0; i < signature.size(); ++i) {
    if (signature[i] != first) continue;
    for (std::size_t j = 0; j < signature.size(); ++j)
      if (signature[j] == second) out.push_back({i, j});
  }
  return out;
}

std::vector<ValueKind> SignatureOf(std::span<const ParamValue> params) {
  std::vector<ValueKind> out;
  out.reserve(params.size());
  for (const ParamValue& p : params) out.push_back(p.value.kind());
  return out;
}

}  // namespace orion
