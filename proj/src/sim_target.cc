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

#include "orion/sim_target.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orion/errors.h"
#include "orion/rng.h"

namespace orion::sim {
namespace {

using K = ValueKind;

constexpr std::int64_t kInt32Max = 2147483647;
constexpr std::int64_t kTwo31 = std::int64_t{1} << 31;

// Thrown by argument validation; becomes an exception marker.
struct Rejected {
  std::string type;
  std::string message;
};

[[noreturn]] void Reject(std::string message) {
  throw Rejected{"ValueError", std::move(message)};
}

[[noreturn]] void RejectArgument(std::string message) {
  throw Rejected{"InvalidArgumentError", std::move(message)};
}

double ScalarToDouble(const Scalar& s) {
  if (const auto* d = std::get_if<double>(&s)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&s)) return static_cast<double>(*i);
  if (const auto* b = std::get_if<bool>(&s)) return *b ? 1.0 : 0.0;
  Reject("tensor fill must be numeric");
}

double ElementAt(const TensorValue& t, std::uint64_t i) {
  if (const auto* c = std::get_if<ConstantFill>(&t.fill)) return ScalarToDouble(c->value);
  const auto& u = std::get<UniformFill>(t.fill);
  Rng rng(KeyBuilder(u.seed).Add(i).key());
  return u.lo + (u.hi - u.lo) * rng.Unit();
}

std::uint64_t CountOf(const std::vector<std::int64_t>& shape) {
  TensorValue probe;
  probe.shape = shape;
  const auto n = probe.element_count();
  if (!n) RejectArgument("shape has a negative extent or too many elements");
  return *n;
}

// Summary of a tensor whose i-th element is elem(i). The checksum scales
// the emitted prefix up to the full element count.
OutputSummary Summarize(std::vector<std::int64_t> shape, DType dtype,
                        const std::function<double(std::uint64_t)>& elem) {
  OutputSummary s;
  s.count = CountOf(shape);
  s.shape = std::move(shape);
  s.dtype = std::string(DTypeName(dtype));
  const std::uint64_t n =
      std::min<std::uint64_t>(s.count, OutputSummary::kMaxSummaryValues);
  double total = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    s.values.push_back(elem(i));
    total += s.values.back();
  }
  s.checksum = n == 0 ? 0.0 : total * (static_cast<double>(s.count) / static_cast<double>(n));
  return s;
}

const TensorValue& TensorArg(std::span<const ParamValue> params, std::size_t i) {
  if (i >= params.size() || !params[i].value.is(K::kTensor))
    Reject("argument " + std::to_string(i) + " must be a tensor");
  const TensorValue& t = params[i].value.tensor();
  CountOf(t.shape);
  if (const auto* c = std::get_if<ConstantFill>(&t.fill)) ScalarToDouble(c->value);
  return t;
}

const Value::List& IntListArg(std::span<const ParamValue> params, std::size_t i) {
  if (i >= params.size() || !params[i].value.is(K::kList))
    Reject("argument " + std::to_string(i) + " must be a list");
  for (const Value& v : params[i].value.list())
    if (!v.is(K::kInt)) Reject("argument " + std::to_string(i) + " must hold integers");
  return params[i].value.list();
}

bool IsTensor(std::span<const ParamValue> p, std::size_t i) {
  return i < p.size() && p[i].value.is(K::kTensor);
}

bool IsList(std::span<const ParamValue> p, std::size_t i) {
  return i < p.size() && p[i].value.is(K::kList);
}

std::optional<double> ConstantFillValue(const TensorValue& t) {
  const auto* c = std::get_if<ConstantFill>(&t.fill);
  if (!c) return std::nullopt;
  if (const auto* d = std::get_if<double>(&c->value)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c->value)) return static_cast<double>(*i);
  return std::nullopt;
}

SimResult Ok(OutputSummary s) {
  SimResult r;
  r.output = std::move(s);
  return r;
}

OutputSummary Passthrough(const TensorValue& t, std::vector<std::int64_t> shape) {
  return Summarize(std::move(shape), t.dtype, [&](std::uint64_t i) { return ElementAt(t, i); });
}

ParamValue Param(std::string name, int pos, Value v) {
  return ParamValue{std::move(name), pos, std::move(v)};
}

Value Uniform(std::vector<std::int64_t> shape, DType dtype, std::uint64_t seed) {
  return Value::Tensor(TensorValue{UniformFill{0.0, 1.0, seed}, std::move(shape), dtype});
}

Value IntList(std::initializer_list<std::int64_t> xs) {
  Value::List out;
  for (std::int64_t x : xs) out.push_back(Value::Int(x));
  return Value::MakeList(std::move(out));
}

TraceRecord Seed(const std::string& api, std::vector<ParamValue> params) {
  TraceRecord r;
  r.api = api;
  r.params = std::move(params);
  r.source = Source::kSynthetic;
  r.developer = false;
  r.id = RecordId(r.api, r.params);
  return r;
}

struct Entry {
  PlantedBug bug;
  SimApiSpec spec;
};

// ---- Catalog entries ------------------------------------------------------

Entry LuUnpack() {
  Entry e;
  e.bug = {"r1_lu_unpack", "sim.lu_unpack", {RuleId::kR1}, FaultKind::kSegfault,
           "rank mismatch of at least two between the factor and pivot tensors",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0) || !IsTensor(p, 1)) return false;
             const auto ra = static_cast<std::int64_t>(p[0].value.tensor().rank());
             const auto rb = static_cast<std::int64_t>(p[1].value.tensor().rank());
             return ra >= 1 && rb >= 1 && std::abs(ra - rb) >= 2;
           }};
  e.spec.param_names = {"LU_data", "LU_pivots"};
  e.spec.seeds = {Seed(e.bug.api, {Param("LU_data", 0, Uniform({3, 3}, DType::kFloat32, 11)),
                                   Param("LU_pivots", 1, Uniform({1, 3}, DType::kFloat32, 12))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& a = TensorArg(p, 0);
    const TensorValue& b = TensorArg(p, 1);
    if (a.rank() != b.rank()) RejectArgument("LU_data and LU_pivots ranks differ");
    return Ok(Passthrough(a, a.shape));
  };
  return e;
}

Entry ReduceSum() {
  Entry e;
  e.bug = {"r2_reduce_sum", "sim.reduce_sum", {RuleId::kR2}, FaultKind::kSegfault,
           "axis beyond the tensor rank indexes past the shape array",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0) || p.size() < 2 || !p[1].value.is(K::kInt)) return false;
             const auto rank = static_cast<std::int64_t>(p[0].value.tensor().rank());
             const std::int64_t axis = p[1].value.as_int();
             return axis > rank && axis < kTwo31;
           }};
  e.spec.param_names = {"input", "axis"};
  e.spec.seeds = {Seed(e.bug.api, {Param("input", 0, Uniform({2, 3}, DType::kFloat32, 21)),
                                   Param("axis", 1, Value::Int(0))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    if (p.size() < 2 || !p[1].value.is(K::kInt)) Reject("axis must be an integer");
    const auto rank = static_cast<std::int64_t>(t.rank());
    std::int64_t axis = p[1].value.as_int();
    if (rank == 0 || axis < -rank || axis >= rank) RejectArgument("axis out of range");
    if (axis < 0) axis += rank;
    std::vector<std::int64_t> shape = t.shape;
    const std::int64_t extent = shape[axis];
    shape.erase(shape.begin() + axis);
    return Ok(Summarize(shape, t.dtype, [&](std::uint64_t i) {
      return ElementAt(t, i) * static_cast<double>(extent);
    }));
  };
  return e;
}

Entry Transpose() {
  Entry e;
  e.bug = {"r3_transpose", "sim.transpose", {RuleId::kR3}, FaultKind::kAbort,
           "permutation one longer than the tensor rank",
           [](std::span<const ParamValue> p) {
             return IsTensor(p, 0) && IsList(p, 1) &&
                    p[1].value.list().size() == p[0].value.tensor().rank() + 1;
           }};
  e.spec.param_names = {"x", "perm"};
  e.spec.seeds = {Seed(e.bug.api, {Param("x", 0, Uniform({3, 4}, DType::kFloat32, 31)),
                                   Param("perm", 1, IntList({1, 0}))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    const Value::List& perm = IntListArg(p, 1);
    if (perm.size() != t.rank()) RejectArgument("perm length must equal the rank");
    std::vector<bool> seen(perm.size(), false);
    std::vector<std::int64_t> shape;
    for (const Value& v : perm) {
      const std::int64_t d = v.as_int();
      if (d < 0 || d >= static_cast<std::int64_t>(perm.size()) || seen[d])
        RejectArgument("perm is not a permutation");
      seen[d] = true;
      shape.push_back(t.shape[d]);
    }
    return Ok(Passthrough(t, shape));
  };
  return e;
}

Entry Gather() {
  Entry e;
  e.bug = {"r4_gather", "sim.gather", {RuleId::kR4}, FaultKind::kSegfault,
           "index past the first extent read without a bounds check",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0) || !IsList(p, 1)) return false;
             const TensorValue& t = p[0].value.tensor();
             if (t.rank() == 0 || t.shape[0] <= 0) return false;
             for (const Value& v : p[1].value.list())
               if (v.is(K::kInt) && v.as_int() >= t.shape[0] && v.as_int() < kTwo31)
                 return true;
             return false;
           }};
  e.spec.param_names = {"params", "indices"};
  e.spec.seeds = {Seed(e.bug.api, {Param("params", 0, Uniform({4, 3}, DType::kFloat32, 41)),
                                   Param("indices", 1, IntList({0, 1}))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    const Value::List& idx = IntListArg(p, 1);
    if (t.rank() == 0) RejectArgument("params must have rank >= 1");
    std::vector<std::int64_t> rows;
    for (const Value& v : idx) {
      if (v.as_int() < 0 || v.as_int() >= t.shape[0]) RejectArgument("index out of range");
      rows.push_back(v.as_int());
    }
    std::vector<std::int64_t> shape = t.shape;
    shape[0] = static_cast<std::int64_t>(rows.size());
    const std::uint64_t inner = CountOf({shape.begin() + 1, shape.end()});
    return Ok(Summarize(shape, t.dtype, [&](std::uint64_t i) {
      const std::uint64_t r = i / inner;
      return ElementAt(t, static_cast<std::uint64_t>(rows[r]) * inner + i % inner);
    }));
  };
  return e;
}

Entry BroadcastShapes() {
  Entry e;
  e.bug = {"r5_broadcast_shapes", "sim.broadcast_shapes", {RuleId::kR5}, FaultKind::kHang,
           "shape lists of different lengths spin in the alignment loop",
           [](std::span<const ParamValue> p) {
             if (!IsList(p, 0) || !IsList(p, 1)) return false;
             const auto& a = p[0].value.list();
             const auto& b = p[1].value.list();
             return !a.empty() && !b.empty() && a.size() != b.size();
           }};
  e.spec.param_names = {"shape_a", "shape_b"};
  e.spec.seeds = {Seed(e.bug.api, {Param("shape_a", 0, IntList({2, 3})),
                                   Param("shape_b", 1, IntList({2, 3}))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const Value::List& a = IntListArg(p, 0);
    const Value::List& b = IntListArg(p, 1);
    const std::size_t n = std::max(a.size(), b.size());
    std::vector<double> out(n, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
      const std::int64_t x = k < a.size() ? a[a.size() - 1 - k].as_int() : 1;
      const std::int64_t y = k < b.size() ? b[b.size() - 1 - k].as_int() : 1;
      if (x < 0 || y < 0) Reject("negative extent");
      if (x != y && x != 1 && y != 1) Reject("shapes are not broadcastable");
      out[n - 1 - k] = static_cast<double>(x == 1 ? y : x);
    }
    return Ok(Summarize({static_cast<std::int64_t>(n)}, DType::kInt64,
                        [&](std::uint64_t i) { return out[i]; }));
  };
  return e;
}

Entry LogSoftmax() {
  Entry e;
  e.bug = {"r6_log_softmax", "sim.log_softmax", {RuleId::kR6}, FaultKind::kAbort,
           "NaN input trips an internal assertion",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0)) return false;
             const auto v = ConstantFillValue(p[0].value.tensor());
             return v && std::isnan(*v);
           }};
  e.spec.param_names = {"logits"};
  e.spec.seeds = {Seed(e.bug.api, {Param("logits", 0, Uniform({2, 3}, DType::kFloat32, 61))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    if (!IsFloating(t.dtype)) Reject("logits must be floating point");
    const double width = t.rank() == 0 ? 1.0 : std::max<double>(1.0, static_cast<double>(t.shape.back()));
    return Ok(Summarize(t.shape, t.dtype, [&](std::uint64_t) { return -std::log(width); }));
  };
  return e;
}

Entry ZerosLike() {
  Entry e;
  e.bug = {"r7_8_zeros_like", "sim.zeros_like", {RuleId::kR7, RuleId::kR8}, FaultKind::kSegfault,
           "negative extent passed to the allocator",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0)) return false;
             for (std::int64_t d : p[0].value.tensor().shape)
               if (d < 0) return true;
             return false;
           }};
  e.spec.param_names = {"input"};
  e.spec.seeds = {Seed(e.bug.api, {Param("input", 0, Uniform({2, 3}, DType::kFloat32, 71))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    return Ok(Summarize(t.shape, t.dtype, [](std::uint64_t) { return 0.0; }));
  };
  return e;
}

Entry Arange() {
  Entry e;
  e.bug = {"r11_arange", "sim.arange", {RuleId::kR11}, FaultKind::kAbort,
           "limit above the 32-bit range overflows the size computation",
           [](std::span<const ParamValue> p) {
             return !p.empty() && p[0].value.is(K::kInt) && p[0].value.as_int() > kInt32Max;
           }};
  e.spec.param_names = {"limit", "delta"};
  e.spec.seeds = {Seed(e.bug.api, {Param("limit", 0, Value::Int(10)),
                                   Param("delta", 1, Value::Real(1.0))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    auto number = [&](std::size_t i) -> double {
      if (i >= p.size()) Reject("missing argument");
      const Value& v = p[i].value;
      if (v.is(K::kInt)) return static_cast<double>(v.as_int());
      if (v.is(K::kReal) && std::isfinite(v.as_real())) return v.as_real();
      Reject("arange arguments must be finite numbers");
    };
    const double limit = number(0);
    const double delta = number(1);
    if (delta == 0.0) Reject("delta must be non-zero");
    const double n = std::max(0.0, std::ceil(limit / delta));
    if (n > 1e12) RejectArgument("requested range is too large");
    return Ok(Summarize({static_cast<std::int64_t>(n)}, DType::kFloat32,
                        [&](std::uint64_t i) { return static_cast<double>(i) * delta; }));
  };
  return e;
}

Entry Sort() {
  Entry e;
  e.bug = {"r12_sort", "sim.sort", {RuleId::kR12}, FaultKind::kSegfault,
           "integer flag reinterpreted as a pointer-sized comparator",
           [](std::span<const ParamValue> p) {
             return p.size() >= 2 && p[1].value.is(K::kInt);
           }};
  e.spec.param_names = {"input", "descending"};
  e.spec.seeds = {Seed(e.bug.api, {Param("input", 0, Uniform({5}, DType::kFloat32, 121)),
                                   Param("descending", 1, Value::Bool(false))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    if (p.size() < 2 || !p[1].value.is(K::kBool)) Reject("descending must be a bool");
    const bool desc = p[1].value.as_bool();
    OutputSummary s = Passthrough(t, t.shape);
    std::sort(s.values.begin(), s.values.end());
    if (desc) std::reverse(s.values.begin(), s.values.end());
    return Ok(std::move(s));
  };
  return e;
}

Entry Einsum() {
  Entry e;
  e.bug = {"r13_einsum", "sim.einsum", {RuleId::kR13}, FaultKind::kSegfault,
           "non-ASCII subscript indexes the label table with a negative char",
           [](std::span<const ParamValue> p) {
             if (p.empty() || !p[0].value.is(K::kStr)) return false;
             for (unsigned char c : p[0].value.as_str())
               if (c >= 0x80) return true;
             return false;
           }};
  e.spec.param_names = {"equation", "operand"};
  e.spec.seeds = {Seed(e.bug.api, {Param("equation", 0, Value::Str("ij->ji")),
                                   Param("operand", 1, Uniform({2, 3}, DType::kFloat32, 131))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    if (p.empty() || !p[0].value.is(K::kStr)) Reject("equation must be a string");
    const TensorValue& t = TensorArg(p, 1);
    const std::string& eq = p[0].value.as_str();
    const auto arrow = eq.find("->");
    if (arrow == std::string::npos) Reject("equation needs '->'");
    const std::string lhs = eq.substr(0, arrow);
    const std::string rhs = eq.substr(arrow + 2);
    if (lhs.size() != t.rank()) Reject("subscript count does not match the operand rank");
    std::map<char, std::int64_t> extent;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      if (lhs[i] < 'a' || lhs[i] > 'z') Reject("invalid subscript");
      auto [it, fresh] = extent.emplace(lhs[i], t.shape[i]);
      if (!fresh && it->second != t.shape[i]) Reject("repeated subscript extents differ");
    }
    std::vector<std::int64_t> shape;
    double contracted = 1.0;
    for (char c : rhs) {
      auto it = extent.find(c);
      if (it == extent.end()) Reject("output subscript not in input");
      shape.push_back(it->second);
    }
    for (const auto& [c, n] : extent)
      if (rhs.find(c) == std::string::npos) contracted *= static_cast<double>(n);
    return Ok(Summarize(shape, t.dtype,
                        [&](std::uint64_t i) { return ElementAt(t, i) * contracted; }));
  };
  return e;
}

Entry Pad() {
  Entry e;
  e.bug = {"r14_pad", "sim.pad", {RuleId::kR14}, FaultKind::kAbort,
           "padding above the 32-bit range overflows the output size check",
           [](std::span<const ParamValue> p) {
             if (!IsList(p, 1)) return false;
             for (const Value& v : p[1].value.list())
               if (v.is(K::kInt) && v.as_int() > kInt32Max) return true;
             return false;
           }};
  e.spec.param_names = {"input", "paddings"};
  e.spec.seeds = {Seed(e.bug.api, {Param("input", 0, Uniform({2, 3}, DType::kFloat32, 141)),
                                   Param("paddings", 1, IntList({1, 1, 0, 2}))})};
  e.spec.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& t = TensorArg(p, 0);
    const Value::List& pads = IntListArg(p, 1);
    if (pads.size() != 2 * t.rank()) RejectArgument("paddings must hold two entries per axis");
    std::vector<std::int64_t> shape = t.shape;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      const std::int64_t lo = pads[2 * i].as_int();
      const std::int64_t hi = pads[2 * i + 1].as_int();
      if (lo < 0 || hi < 0) RejectArgument("paddings must be non-negative");
      shape[i] += lo + hi;
    }
    return Ok(Summarize(shape, t.dtype, [](std::uint64_t) { return 0.0; }));
  };
  return e;
}

Entry ReduceMean() {
  Entry e;
  e.bug = {"diff_reduce_mean", "sim.reduce_mean", {RuleId::kR6}, FaultKind::kWrongOutputOnB,
           "single-precision accumulation on device B overflows for huge inputs",
           [](std::span<const ParamValue> p) {
             if (!IsTensor(p, 0)) return false;
             const auto v = ConstantFillValue(p[0].value.tensor());
             return v && std::isfinite(*v) && std::fabs(*v) >= 1e30;
           }};
  e.spec.param_names = {"input"};
  e.spec.seeds = {Seed(e.bug.api, {Param("input", 0, Uniform({2, 3}, DType::kFloat32, 151))})};
  const Trigger trigger = e.bug.trigger;
  e.spec.behavior = [trigger](std::span<const ParamValue> p, bool divergent) {
    const TensorValue& t = TensorArg(p, 0);
    double mean;
    if (const auto v = ConstantFillValue(t)) {
      mean = *v;
    } else if (const auto* u = std::get_if<UniformFill>(&t.fill)) {
      mean = (u->lo + u->hi) / 2.0;
    } else {
      mean = ElementAt(t, 0);
    }
    SimResult r = Ok(Summarize({}, t.dtype, [&](std::uint64_t) { return mean; }));
    if (divergent && trigger(p)) {
      const double inf = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.output->values = {inf};
      r.output->checksum = inf;
      r.bug_id = "diff_reduce_mean";
    }
    return r;
  };
  return e;
}

SimApiSpec Control() {
  SimApiSpec s;
  s.api = "sim.add";
  s.param_names = {"x", "y"};
  s.seeds = {Seed(s.api, {Param("x", 0, Uniform({2, 3}, DType::kFloat32, 1)),
                          Param("y", 1, Uniform({2, 3}, DType::kFloat32, 2))})};
  s.behavior = [](std::span<const ParamValue> p, bool) {
    const TensorValue& a = TensorArg(p, 0);
    const TensorValue& b = TensorArg(p, 1);
    if (a.shape != b.shape) RejectArgument("operand shapes differ");
    return Ok(Summarize(a.shape, a.dtype, [&](std::uint64_t i) {
      return ElementAt(a, i) + ElementAt(b, i);
    }));
  };
  return s;
}

std::vector<Entry> AllEntries() {
  return {LuUnpack(),  ReduceSum(), Transpose(), Gather(), BroadcastShapes(),
          LogSoftmax(), ZerosLike(), Arange(),   Sort(),   Einsum(),
          Pad(),        ReduceMean()};
}

}  // namespace

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kSegfault:
      return "segfault";
    case FaultKind::kAbort:
      return "abort";
    case FaultKind::kHang:
      return "hang";
    case FaultKind::kWrongOutputOnB:
      return "wrong-output-on-device-b";
  }
  return "?";
}

bool IsDivergentDevice(std::string_view device) {
  return device == "B" || device == "gpu";
}

Catalog Catalog::Default() { return FromJson(Json::object()); }

Catalog Catalog::FromJson(const Json& j) {
  if (!j.is_object()) throw ConfigError("sim catalog config must be an object");
  for (const auto& [key, v] : j.items())
    if (key != "bugs" && key != "control")
      throw ConfigError("unknown sim catalog key: " + key);
  std::vector<Entry> entries = AllEntries();
  std::set<std::string> wanted;
  const bool all = !j.contains("bugs");
  if (!all) {
    try {
      for (const std::string& id : j.at("bugs").get<std::vector<std::string>>()) wanted.insert(id);
    } catch (const Json::exception& e) {
      throw ConfigError(std::string("sim catalog bugs: ") + e.what());
    }
    for (const std::string& id : wanted) {
      if (std::none_of(entries.begin(), entries.end(),
                       [&](const Entry& e) { return e.bug.bug_id == id; }))
        throw ConfigError("unknown planted bug: " + id);
    }
  }
  Catalog c;
  for (Entry& e : entries) {
    if (!all && !wanted.count(e.bug.bug_id)) continue;
    e.spec.api = e.bug.api;
    c.bugs_.push_back(e.bug);
    c.specs_.emplace(e.spec.api, std::move(e.spec));
  }
  const bool control = j.contains("control") ? j.at("control").get<bool>() : all;
  if (control) {
    SimApiSpec s = Control();
    c.specs_.emplace(s.api, std::move(s));
  }
  return c;
}

SimResult Catalog::Invoke(std::string_view api, std::span<const ParamValue> params,
                          std::string_view device) const {
  auto it = specs_.find(api);
  if (it == specs_.end()) throw UnknownApi(std::string(api));
  if (const PlantedBug* bug = BugForApi(api);
      bug && bug->fault != FaultKind::kWrongOutputOnB && bug->trigger(params)) {
    SimResult r;
    r.fault = bug->fault;
    r.bug_id = bug->bug_id;
    return r;
  }
  try {
    return it->second.behavior(params, IsDivergentDevice(device));
  } catch (const Rejected& e) {
    SimResult r;
    r.exception = e.type;
    return r;
  }
}

std::vector<TraceRecord> Catalog::SeedCatalog() const {
  std::vector<TraceRecord> out;
  for (const auto& [api, spec] : specs_)
    out.insert(out.end(), spec.seeds.begin(), spec.seeds.end());
  return out;
}

std::vector<std::string> Catalog::apis() const {
  std::vector<std::string> out;
  for (const auto& [api, spec] : specs_) out.push_back(api);
  return out;
}

const PlantedBug* Catalog::BugForApi(std::string_view api) const {
  for (const PlantedBug& b : bugs_)
    if (b.api == api) return &b;
  return nullptr;
}

const PlantedBug* Catalog::FindBug(std::string_view bug_id) const {
  for (const PlantedBug& b : bugs_)
    if (b.bug_id == bug_id) return &b;
  return nullptr;
}

std::map<std::string, std::set<RuleId>> Reachability(const Catalog& catalog,
                                                     int seeds_per_rule,
                                                     const CornerConfig& config) {
  const RuleTable table;
  std::map<std::string, std::set<RuleId>> out;
  for (const PlantedBug& bug : catalog.bugs()) {
    std::set<RuleId>& reach = out[bug.bug_id];
    for (const TraceRecord& seed : catalog.SeedCatalog()) {
      if (seed.api != bug.api) continue;
      const std::vector<ValueKind> sig = SignatureOf(seed.params);
      for (RuleId rule : kAllRules) {
        std::vector<RuleTarget> targets;
        if (GetRuleInfo(rule).pairwise()) {
          targets = RuleTable::PairTargets(rule, sig);
        } else {
          for (std::size_t i = 0; i < sig.size(); ++i) {
            const auto& rules = table.Unary(sig[i]);
            if (std::find(rules.begin(), rules.end(), rule) != rules.end())
              targets.push_back({i, std::nullopt});
          }
        }
        for (const RuleTarget& target : targets) {
          for (int s = 0; s < seeds_per_rule && !reach.count(rule); ++s) {
            try {
              const Mutation m = ApplyRule(rule, seed.params, target,
                                           KeyBuilder(0x5eed).Add(static_cast<std::uint64_t>(s)).key(),
                                           config);
              if (bug.trigger(m.params)) reach.insert(rule);
            } catch (const NotApplicable&) {
            } catch (const IllegalKindForType&) {
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::string> SoundnessViolations(const Catalog& catalog) {
  std::vector<std::string> out;
  for (const TraceRecord& seed : catalog.SeedCatalog()) {
    const PlantedBug* bug = catalog.BugForApi(seed.api);
    if (bug && bug->trigger(seed.params)) out.push_back(bug->bug_id);
  }
  return out;
}

}  // namespace orion::sim
