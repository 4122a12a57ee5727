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

#include "orion/codegen.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "orion/errors.h"

namespace orion {
namespace {

// Helpers embedded in every script. _orion_emit writes the bounded output
// summary; _orion_resolve imports the longest importable module prefix of a
// dotted name and walks the remaining attributes.
constexpr std::string_view kPythonHelpers = R"PY(def _orion_resolve(name):
    import importlib
    parts = name.split(".")
    for i in range(len(parts), 0, -1):
        try:
            obj = importlib.import_module(".".join(parts[:i]))
        except ImportError:
            continue
        for p in parts[i:]:
            obj = getattr(obj, p)
        return obj
    raise ImportError(name)


def _orion_flat(x):
    if hasattr(x, "numpy") and callable(x.numpy):
        try:
            x = x.numpy()
        except Exception:
            pass
    if hasattr(x, "tolist"):
        x = x.tolist()
    if isinstance(x, (list, tuple)):
        out = []
        for e in x:
            out.extend(_orion_flat(e))
        return out
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (bool, int, float)):
        return [float(x)]
    return []


def _orion_num(v):
    if v != v:
        return "nan"
    if v == float("inf"):
        return "inf"
    if v == float("-inf"):
        return "-inf"
    return v


def _orion_emit(result):
    import json
    vals = _orion_flat(result)
    if hasattr(result, "shape"):
        shape = [int(s) for s in result.shape]
    elif isinstance(result, (list, tuple)):
        shape = [len(vals)]
    else:
        shape = []
    total = 0.0
    for v in vals:
        total += v
    summary = {
        "shape": shape,
        "dtype": str(getattr(result, "dtype", type(result).__name__)),
        "count": len(vals),
        "values": [_orion_num(v) for v in vals[:64]],
        "checksum": _orion_num(total),
    }
    print("ORION-OUT-BEGIN")
    print(json.dumps(summary))
    print("ORION-OUT-END", flush=True)
)PY";

std::string Substitute(std::string_view tmpl,
                       const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
      out.push_back('{');
      ++i;
    } else if (c == '}' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      out.push_back('}');
      ++i;
    } else if (c == '{') {
      const std::size_t close = tmpl.find('}', i);
      if (close == std::string_view::npos)
        throw ConfigError("unterminated placeholder in template: " + std::string(tmpl));
      const std::string key(tmpl.substr(i + 1, close - i - 1));
      auto it = vars.find(key);
      if (it == vars.end())
        throw ConfigError("unknown placeholder {" + key + "} in template");
      out += it->second;
      i = close;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string RealLiteral(double v, const TargetProfile& p) {
  if (std::isnan(v)) return p.nan_literal;
  if (std::isinf(v)) return v > 0 ? p.inf_literal : "-" + p.inf_literal;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string ScalarLiteral(const Scalar& s, const TargetProfile& p) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, NoneValue>) {
          return p.none_literal;
        } else if constexpr (std::is_same_v<T, bool>) {
          return x ? p.true_literal : p.false_literal;
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<T, double>) {
          return RealLiteral(x, p);
        } else {
          return PythonStringLiteral(x);
        }
      },
      s);
}

std::string ShapeLiteral(const std::vector<std::int64_t>& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::string ValueLiteral(const Value& v, const TargetProfile& p) {
  switch (v.kind()) {
    case ValueKind::kNone:
      return p.none_literal;
    case ValueKind::kInt:
      return std::to_string(v.as_int());
    case ValueKind::kReal:
      return RealLiteral(v.as_real(), p);
    case ValueKind::kBool:
      return v.as_bool() ? p.true_literal : p.false_literal;
    case ValueKind::kStr:
      return PythonStringLiteral(v.as_str());
    case ValueKind::kList: {
      std::string out = "[";
      for (std::size_t i = 0; i < v.list().size(); ++i) {
        if (i) out += ", ";
        out += ValueLiteral(v.list()[i], p);
      }
      return out + "]";
    }
    case ValueKind::kTensor: {
      const TensorValue& t = v.tensor();
      const std::string dtype_name(DTypeName(t.dtype));
      auto dt = p.dtypes.find(dtype_name);
      if (dt == p.dtypes.end())
        throw UnrenderableParam("profile " + p.name + " cannot render tensor dtype " +
                                dtype_name);
      std::map<std::string, std::string> vars = {{"module", p.module},
                                                 {"shape", ShapeLiteral(t.shape)},
                                                 {"dtype", dt->second}};
      if (const auto* c = std::get_if<ConstantFill>(&t.fill)) {
        if (p.tensor_constant.empty())
          throw UnrenderableParam("profile " + p.name + " cannot render tensor");
        vars["value"] = ScalarLiteral(c->value, p);
        return Substitute(p.tensor_constant, vars);
      }
      const auto& u = std::get<UniformFill>(t.fill);
      if (p.tensor_uniform.empty())
        throw UnrenderableParam("profile " + p.name + " cannot render tensor");
      vars["lo"] = RealLiteral(u.lo, p);
      vars["hi"] = RealLiteral(u.hi, p);
      vars["seed"] = std::to_string(u.seed);
      return Substitute(p.tensor_uniform, vars);
    }
  }
  throw UnrenderableParam("unknown value kind");
}

bool IsIdentifier(std::string_view s) {
  if (s.empty()) return false;
  auto head = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  };
  if (!head(s[0])) return false;
  for (char c : s)
    if (!head(c) && !(c >= '0' && c <= '9')) return false;
  return true;
}

// Decodes UTF-8 into code points; false on malformed input.
bool DecodeUtf8(std::string_view s, std::vector<std::uint32_t>& out) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    int extra;
    std::uint32_t cp;
    if (c < 0x80) {
      out.push_back(c);
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
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10ffff ||
        (cp >= 0xd800 && cp <= 0xdfff))
      return false;
    out.push_back(cp);
    i += extra + 1;
  }
  return true;
}

void AppendEscaped(std::string& out, std::uint32_t cp) {
  char buf[12];
  switch (cp) {
    case '\\':
      out += "\\\\";
      return;
    case '"':
      out += "\\\"";
      return;
    case '\n':
      out += "\\n";
      return;
    case '\r':
      out += "\\r";
      return;
    case '\t':
      out += "\\t";
      return;
    default:
      break;
  }
  if (cp >= 0x20 && cp < 0x7f) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x100) {
    std::snprintf(buf, sizeof buf, "\\x%02x", cp);
    out += buf;
  } else if (cp < 0x10000) {
    std::snprintf(buf, sizeof buf, "\\u%04x", cp);
    out += buf;
  } else {
    std::snprintf(buf, sizeof buf, "\\U%08x", cp);
    out += buf;
  }
}

std::string TrimRight(std::string_view s) {
  std::size_t end = s.size();
  while (end > 0 && (s[end - 1] == '\r' || s[end - 1] == ' ' || s[end - 1] == '\t'))
    --end;
  return std::string(s.substr(0, end));
}

bool ValidExceptionName(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
          (c >= '0' && c <= '9') || c == '_' || c == '.'))
      return false;
  return true;
}

Json NumberJson(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double NumberFromJson(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf" || s == "Infinity") return std::numeric_limits<double>::infinity();
    if (s == "-inf" || s == "-Infinity") return -std::numeric_limits<double>::infinity();
  }
  throw IncomparableOutputs("non-numeric output element: " + j.dump());
}

std::map<std::string, std::string> QuotedDTypes() {
  std::map<std::string, std::string> out;
  for (DType d : {DType::kFloat16, DType::kFloat32, DType::kFloat64, DType::kInt8,
                  DType::kInt16, DType::kInt32, DType::kInt64, DType::kUInt8,
                  DType::kBool, DType::kComplex64, DType::kString}) {
    const std::string n(DTypeName(d));
    out[n] = "'" + n + "'";
  }
  return out;
}

}  // namespace

std::string OutputSummary::ToLine() const {
  Json vals = Json::array();
  for (double v : values) vals.push_back(NumberJson(v));
  Json j{{"shape", shape}, {"dtype", dtype}, {"count", count}, {"values", vals}};
  if (checksum) j["checksum"] = NumberJson(*checksum);
  return j.dump();
}

OutputSummary OutputSummary::Parse(std::string_view block) {
  Json j;
  try {
    j = Json::parse(block);
  } catch (const Json::parse_error& e) {
    throw IncomparableOutputs(std::string("malformed output block: ") + e.what());
  }
  OutputSummary s;
  try {
    if (j.is_array()) {
      for (const Json& e : j) s.values.push_back(NumberFromJson(e));
      s.count = s.values.size();
      s.shape = {static_cast<std::int64_t>(s.count)};
      return s;
    }
    if (!j.is_object()) throw IncomparableOutputs("output block must be an object");
    s.shape = j.at("shape").get<std::vector<std::int64_t>>();
    s.dtype = j.value("dtype", "");
    for (const Json& e : j.at("values")) s.values.push_back(NumberFromJson(e));
    s.count = j.value("count", static_cast<std::uint64_t>(s.values.size()));
    if (auto it = j.find("checksum"); it != j.end() && !it->is_null())
      s.checksum = NumberFromJson(*it);
  } catch (const Json::exception& e) {
    throw IncomparableOutputs(std::string("malformed output block: ") + e.what());
  }
  return s;
}

MarkerParse ParseMarkers(std::string_view bytes) {
  MarkerParse m;
  bool in_block = false;
  std::string block;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    const std::string line = TrimRight(bytes.substr(pos, nl - pos));
    pos = nl + 1;
    if (in_block) {
      if (line == kOutEnd) {
        m.output_block = block;
        in_block = false;
      } else {
        if (!block.empty()) block.push_back('\n');
        block += line;
      }
      continue;
    }
    if (line == kOutBegin) {
      in_block = true;
      block.clear();
    } else if (line == "ORION::OK") {
      m.verdict = MarkerVerdict::kOk;
      m.exception.clear();
    } else if (line.rfind("ORION::EXC:", 0) == 0 &&
               ValidExceptionName(std::string_view(line).substr(11))) {
      m.verdict = MarkerVerdict::kException;
      m.exception = line.substr(11);
    }
  }
  return m;
}

std::string FormatMarkers(const MarkerParse& m) {
  std::string out;
  if (m.verdict == MarkerVerdict::kOk) out += "ORION::OK\n";
  if (m.verdict == MarkerVerdict::kException) out += "ORION::EXC:" + m.exception + "\n";
  if (m.output_block) {
    out += std::string(kOutBegin) + "\n" + *m.output_block + "\n" + std::string(kOutEnd) + "\n";
  }
  return out;
}

std::string PythonStringLiteral(std::string_view bytes) {
  std::vector<std::uint32_t> cps;
  std::string out;
  if (DecodeUtf8(bytes, cps)) {
    out.push_back('"');
    for (std::uint32_t cp : cps) AppendEscaped(out, cp);
    out.push_back('"');
    return out;
  }
  out = "b\"";
  for (unsigned char c : bytes) {
    if (c >= 0x80) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    } else {
      AppendEscaped(out, c);
    }
  }
  out.push_back('"');
  return out;
}

TargetProfile TargetProfile::PythonMock() {
  TargetProfile p;
  p.name = "python-mock";
  p.module = "orion_mock";
  p.preamble = "import {module}";
  p.tensor_constant = "{module}.full({shape}, {value}, dtype={dtype})";
  p.tensor_uniform = "{module}.uniform({shape}, {lo}, {hi}, seed={seed}, dtype={dtype})";
  p.device_select = "{module}.set_device({device})";
  p.devices = {{"cpu", "'cpu'"}, {"gpu", "'gpu'"}, {"A", "'A'"}, {"B", "'B'"}};
  p.dtypes = QuotedDTypes();
  return p;
}

TargetProfile TargetProfile::PyTorch() {
  TargetProfile p;
  p.name = "pytorch";
  p.module = "torch";
  p.preamble = "import {module}";
  p.tensor_constant = "{module}.full({shape}, {value}, dtype={dtype})";
  p.tensor_uniform =
      "{module}.empty({shape}, dtype={dtype}).uniform_({lo}, {hi}, "
      "generator={module}.Generator().manual_seed({seed}))";
  p.device_select = "{module}.set_default_device({device})";
  p.devices = {{"cpu", "'cpu'"}, {"gpu", "'cuda'"}};
  p.dtypes = {{"float16", "torch.float16"}, {"float32", "torch.float32"},
              {"float64", "torch.float64"}, {"int8", "torch.int8"},
              {"int16", "torch.int16"},     {"int32", "torch.int32"},
              {"int64", "torch.int64"},     {"uint8", "torch.uint8"},
              {"bool", "torch.bool"},       {"complex64", "torch.complex64"}};
  return p;
}

TargetProfile TargetProfile::TensorFlow() {
  TargetProfile p;
  p.name = "tensorflow";
  p.module = "tf";
  p.preamble = "import tensorflow as {module}";
  p.tensor_constant = "{module}.fill({shape}, {module}.constant({value}, dtype={dtype}))";
  p.tensor_uniform =
      "{module}.random.uniform({shape}, {lo}, {hi}, dtype={dtype}, seed={seed})";
  p.device_select = "{module}.device({device}).__enter__()";
  p.devices = {{"cpu", "'/CPU:0'"}, {"gpu", "'/GPU:0'"}};
  p.dtypes = {{"float16", "tf.float16"}, {"float32", "tf.float32"},
              {"float64", "tf.float64"}, {"int8", "tf.int8"},
              {"int16", "tf.int16"},     {"int32", "tf.int32"},
              {"int64", "tf.int64"},     {"uint8", "tf.uint8"},
              {"bool", "tf.bool"},       {"complex64", "tf.complex64"},
              {"string", "tf.string"}};
  return p;
}

TargetProfile TargetProfile::Builtin(std::string_view name) {
  if (name == "python-mock") return PythonMock();
  if (name == "pytorch") return PyTorch();
  if (name == "tensorflow") return TensorFlow();
  throw ConfigError("unknown target profile: " + std::string(name));
}

TargetProfile TargetProfile::FromJson(const Json& j) {
  if (j.is_string()) return Builtin(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("profile must be a name or an object");
  TargetProfile p = Builtin(j.value("base", "python-mock"));
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "base") continue;
      else if (key == "name") p.name = v.get<std::string>();
      else if (key == "module") p.module = v.get<std::string>();
      else if (key == "preamble") p.preamble = v.get<std::string>();
      else if (key == "tensor_constant") p.tensor_constant = v.get<std::string>();
      else if (key == "tensor_uniform") p.tensor_uniform = v.get<std::string>();
      else if (key == "device_select") p.device_select = v.get<std::string>();
      else if (key == "devices") p.devices = v.get<std::map<std::string, std::string>>();
      else if (key == "dtypes") p.dtypes = v.get<std::map<std::string, std::string>>();
      else if (key == "none_literal") p.none_literal = v.get<std::string>();
      else if (key == "true_literal") p.true_literal = v.get<std::string>();
      else if (key == "false_literal") p.false_literal = v.get<std::string>();
      else if (key == "nan_literal") p.nan_literal = v.get<std::string>();
      else if (key == "inf_literal") p.inf_literal = v.get<std::string>();
      else if (key == "keyword_args") p.keyword_args = v.get<bool>();
      else if (key == "filtered_exceptions")
        p.filtered_exceptions = v.get<std::set<std::string>>();
      else throw ConfigError("unknown profile key: " + key);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("profile: ") + e.what());
  }
  // Surface template typos at load time rather than at the first render.
  const std::map<std::string, std::string> all = {
      {"module", ""}, {"shape", ""}, {"value", ""}, {"dtype", ""},
      {"lo", ""},     {"hi", ""},    {"seed", ""},  {"device", ""}};
  for (const std::string* t : {&p.preamble, &p.tensor_constant, &p.tensor_uniform,
                               &p.device_select})
    Substitute(*t, all);
  return p;
}

Json TargetProfile::ToJson() const {
  return Json{{"name", name},
              {"module", module},
              {"preamble", preamble},
              {"tensor_constant", tensor_constant},
              {"tensor_uniform", tensor_uniform},
              {"device_select", device_select},
              {"devices", devices},
              {"dtypes", dtypes},
              {"none_literal", none_literal},
              {"true_literal", true_literal},
              {"false_literal", false_literal},
              {"nan_literal", nan_literal},
              {"inf_literal", inf_literal},
              {"keyword_args", keyword_args},
              {"filtered_exceptions", filtered_exceptions}};
}

RenderedCase Render(const GeneratedCase& c, const TargetProfile& profile,
                    const std::string& device) {
  const std::map<std::string, std::string> module_vars = {{"module", profile.module}};
  std::string device_expr;
  if (auto it = profile.devices.find(device); it != profile.devices.end()) {
    device_expr = it->second;
  } else {
    device_expr = PythonStringLiteral(device);
  }

  bool keywords = profile.keyword_args;
  for (const ParamValue& p : c.input.params)
    if (!IsIdentifier(p.name)) keywords = false;

  std::ostringstream s;
  s << "# orion case " << c.case_id << "\n";
  s << "# api: " << c.api_name << "\n";
  for (const MutationNote& n : c.notes)
    s << "# rule: " << RuleName(n.rule) << (n.detail.empty() ? "" : " " + n.detail) << "\n";
  s << Substitute(profile.preamble, module_vars) << "\n\n";
  s << kPythonHelpers << "\n\n";
  s << "_orion_api = _orion_resolve(" << PythonStringLiteral(c.api_name) << ")\n";
  if (!profile.device_select.empty())
    s << Substitute(profile.device_select,
                    {{"module", profile.module}, {"device", device_expr}})
      << "\n";
  s << "try:\n";
  std::string args;
  for (std::size_t i = 0; i < c.input.params.size(); ++i) {
    const ParamValue& p = c.input.params[i];
    const std::string var = "arg_" + std::to_string(i + 1);
    s << "    " << var << " = " << ValueLiteral(p.value, profile) << "\n";
    if (i) args += ", ";
    args += keywords ? p.name + "=" + var : var;
  }
  s << "    _orion_result = _orion_api(" << args << ")\n";
  s << "except Exception as _orion_e:\n";
  s << "    print(\"ORION::EXC:\" + type(_orion_e).__name__, flush=True)\n";
  s << "else:\n";
  s << "    print(\"ORION::OK\", flush=True)\n";
  s << "    _orion_emit(_orion_result)\n";
  return RenderedCase{c.case_id, device, s.str()};
}

}  // namespace orion
