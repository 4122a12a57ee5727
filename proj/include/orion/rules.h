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

// The fourteen history-derived mutation rules.
//
// Rules 1-5 (guided) create correlated inconsistencies between two
// arguments: tensor shapes, a tensor and a dimension argument, a tensor and
// an index list, or two lists. Rules 6-14 (corner case) substitute extreme
// or degenerate values into a single argument, chosen by parameter type.
//
// Every mutator is pure. ApplyRule derives all of its randomness from the
// 64-bit seed it is given, and that seed is recorded in the MutationNote so
// the mutation can be replayed exactly.

#ifndef ORION_RULES_H_
#define ORION_RULES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "orion/rng.h"
#include "orion/value.h"

namespace orion {

enum class RuleId : int {
  kR1 = 1,
  kR2,
  kR3,
  kR4,
  kR5,
  kR6,
  kR7,
  kR8,
  kR9,
  kR10,
  kR11,
  kR12,
  kR13,
  kR14,
};

inline constexpr std::array<RuleId, 14> kAllRules = {
    RuleId::kR1,  RuleId::kR2,  RuleId::kR3,  RuleId::kR4,  RuleId::kR5,
    RuleId::kR6,  RuleId::kR7,  RuleId::kR8,  RuleId::kR9,  RuleId::kR10,
    RuleId::kR11, RuleId::kR12, RuleId::kR13, RuleId::kR14};

enum class RuleCategory { kGuided, kCornerCase };

std::string RuleName(RuleId id);  // "R7"
std::optional<RuleId> ParseRuleId(std::string_view name);
std::string_view CategoryName(RuleCategory c);  // "guided" / "corner"

struct RuleInfo {
  RuleId id;
  RuleCategory category;
  std::string_view title;
  // One kind for unary rules, two for pairwise rules.
  std::vector<ValueKind> signature;
  // Corner kinds the rule draws from; empty for structural rules.
  std::vector<CornerKind> corner_kinds;
  std::string_view description;

  bool pairwise() const { return signature.size() == 2; }
};

const RuleInfo& GetRuleInfo(RuleId id);

// Catalog rows as JSON, optionally restricted to one category.
Json RuleCatalogJson(std::optional<RuleCategory> category = std::nullopt);

// ---- Typed mutators -------------------------------------------------------

enum class ShapeOp { kReduce, kExpand };

// R1. Applies a random rank reduction or expansion to `a` and the opposite
// operation to `b`. Expansion appends an axis of extent 1 and bumps it to 2;
// reduction drops the last axis and leaves a scalar alone. If the results
// still coincide, the last extent of `b` is perturbed.
std::pair<TensorValue, TensorValue> ShapeMismatch(const TensorValue& a,
                                                  const TensorValue& b,
                                                  Rng& rng,
                                                  ShapeOp* first_op = nullptr);

// An integer outside {0..rank(t)} and outside the extents of t.
std::int64_t OutOfRangeIndex(const TensorValue& t, Rng& rng);

// R2. Returns the replacement for the dimension argument; `t` is unchanged.
std::int64_t DimMismatch(const TensorValue& t, std::int64_t arg, Rng& rng);

// R3. A copy of `list` whose length is rank(t) + 1 or rank(t) - 1.
Value::List ListIndicesMismatch(const TensorValue& t, const Value::List& list,
                                Rng& rng);

// R4. Replaces one element (inserting into an empty list) with an
// out-of-range index. Throws NotApplicable unless every element is an Int.
Value::List ListElemMismatch(const TensorValue& t, const Value::List& list,
                             Rng& rng);

// R5. Grows or shrinks one of the lists so the lengths differ.
std::pair<Value::List, Value::List> ListLenMismatch(const Value::List& a,
                                                    const Value::List& b,
                                                    Rng& rng);

// R6. Kind must be Large, Zero, Negative or NaN, and legal for the dtype.
TensorValue TensorValueCorner(const TensorValue& t, CornerKind kind,
                              const CornerConfig& config);

enum class Axis { kFirst, kLast };

// R7 (first axis) and R8 (last axis). Kind must be Large, Negative or Zero.
TensorValue TensorShapeCorner(const TensorValue& t, Axis axis, CornerKind kind,
                              const CornerConfig& config);

// R9.
TensorValue ToScalar(const TensorValue& t);

// R10. Rank in [2, nonscalar_max_rank], extents from the configured range.
TensorValue FromScalar(const TensorValue& t, Rng& rng,
                       const CornerConfig& config);

// R11. Int or Real argument; type-changing replacements are deliberate.
Value NumericArgCorner(const Value& arg, CornerKind kind,
                       const CornerConfig& config);

// R12. Bool argument replaced by an Int (Large or Negative).
Value BoolArgCorner(const Value& arg, CornerKind kind,
                    const CornerConfig& config);

// R13. Str argument replaced by "" (Empty) or the non-ASCII sequence.
Value StringArgCorner(const Value& arg, CornerKind kind,
                      const CornerConfig& config);

// R14. Empty empties the list; any other kind replaces one element.
Value::List ListCorner(const Value::List& list, CornerKind kind, Rng& rng,
                       const CornerConfig& config);

// ---- Rule application -----------------------------------------------------

struct RuleTarget {
  std::size_t first = 0;
  std::optional<std::size_t> second;

  friend bool operator==(const RuleTarget&, const RuleTarget&) = default;
};

struct MutationNote {
  RuleId rule = RuleId::kR1;
  std::vector<std::size_t> affected;
  std::vector<std::string> before;
  std::vector<std::string> after;
  std::uint64_t seed = 0;
  // Rule-specific choices, e.g. "kind=nan" or "first=expand".
  std::string detail;

  RuleTarget target() const;
  Json ToJson() const;
  static MutationNote FromJson(const Json& j);
};

struct Mutation {
  std::vector<ParamValue> params;
  MutationNote note;
};

// Applies one rule to the targeted parameter(s). Arity, names and positions
// of the parameter list are preserved. Throws NotApplicable when the targets
// do not fit the rule.
Mutation ApplyRule(RuleId rule, std::span<const ParamValue> params,
                   const RuleTarget& target, std::uint64_t seed,
                   const CornerConfig& config);

// Re-applies the mutation a note describes to the original parameters.
Mutation Replay(const MutationNote& note, std::span<const ParamValue> params,
                const CornerConfig& config);

// Per-type lookup tables. Unary tables are keyed by one ValueKind, pairwise
// tables by an ordered pair. Rules are listed in ascending id order.
class RuleTable {
 public:
  // All fourteen rules.
  RuleTable();
  explicit RuleTable(const std::set<RuleId>& enabled);

  const std::vector<RuleId>& Unary(ValueKind kind) const;
  const std::vector<RuleId>& Pairwise(ValueKind first, ValueKind second) const;

  // Rules usable on a parameter list with this type signature. Pairwise
  // rules are included only when a compatible pair exists.
  std::vector<RuleId> RulesFor(std::span<const ValueKind> signature) const;

  // Candidate (first, second) index pairs for a pairwise rule: adjacent
  // pairs for homogeneous rules, every ordered tensor/companion combination
  // otherwise.
  static std::vector<RuleTarget> PairTargets(RuleId rule,
                                             std::span<const ValueKind> signature);

 private:
  static constexpr std::size_t kKinds = 7;
  std::array<std::vector<RuleId>, kKinds> unary_;
  std::array<std::array<std::vector<RuleId>, kKinds>, kKinds> pairwise_;
};

std::vector<ValueKind> SignatureOf(std::span<const ParamValue> params);

}  // namespace orion

#endif  // ORION_RULES_H_
