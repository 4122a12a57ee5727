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

#include "orion/seed_store.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "orion/errors.h"

namespace orion {

namespace fs = std::filesystem;

namespace {

constexpr char kIndexFile[] = "index.json";

}  // namespace

TestInput TraceRecord::ToTestInput() const {
  return TestInput{api, params, source, id};
}

std::string RecordId(std::string_view api, std::span<const ParamValue> params) {
  Json arr = Json::array();
  for (const ParamValue& p : params) arr.push_back(ParamToJson(p));
  std::uint64_t h = Fnv1a64(api);
  h = Fnv1a64("\n", h);
  h = Fnv1a64(arr.dump(), h);
  return HexDigest(h);
}

Json RecordToJson(const TraceRecord& r) {
  Json params = Json::array();
  for (const ParamValue& p : r.params) params.push_back(ParamToJson(p));
  Json j{{"api", r.api},
         {"params", std::move(params)},
         {"source", SourceName(r.source)},
         {"id", r.id}};
  if (r.timestamp) j["ts"] = *r.timestamp;
  if (r.developer) j["developer"] = *r.developer;
  return j;
}

TraceRecord RecordFromJson(const Json& j) {
  if (!j.is_object()) throw SerializationError("record must be an object");
  TraceRecord r;
  auto api = j.find("api");
  if (api == j.end() || !api->is_string() || api->get_ref<const std::string&>().empty())
    throw SerializationError("record needs a non-empty string 'api'");
  r.api = api->get<std::string>();
  auto params = j.find("params");
  if (params == j.end() || !params->is_array())
    throw SerializationError("record needs a 'params' array");
  std::set<std::string> names;
  for (const Json& p : *params) {
    r.params.push_back(ParamFromJson(p));
    if (!names.insert(r.params.back().name).second)
      throw SerializationError("duplicate parameter name '" + r.params.back().name + "'");
  }
  if (auto s = j.find("source"); s != j.end()) {
    if (!s->is_string()) throw SerializationError("source must be a string");
    auto source = ParseSource(s->get_ref<const std::string&>());
    if (!source) throw SerializationError("unknown source: " + s->get<std::string>());
    r.source = *source;
  }
  if (auto ts = j.find("ts"); ts != j.end() && !ts->is_null()) {
    if (!ts->is_string()) throw SerializationError("ts must be a string");
    r.timestamp = ts->get<std::string>();
  }
  if (auto dev = j.find("developer"); dev != j.end() && !dev->is_null()) {
    if (!dev->is_boolean()) throw SerializationError("developer must be a bool");
    r.developer = dev->get<bool>();
  }
  r.id = RecordId(r.api, r.params);
  return r;
}

bool HasInternalMarker(std::string_view api) {
  std::size_t start = 0;
  while (start <= api.size()) {
    const std::size_t dot = api.find('.', start);
    const std::string_view part =
        api.substr(start, dot == std::string_view::npos ? api.npos : dot - start);
    if (!part.empty() && part.front() == '_') return true;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return false;
}

std::optional<ApiFilter> ParseApiFilter(std::string_view name) {
  if (name == "end_user" || name == "end-user") return ApiFilter::kEndUser;
  if (name == "developer") return ApiFilter::kDeveloper;
  if (name == "all") return ApiFilter::kAll;
  return std::nullopt;
}

Json IngestSummary::ToJson() const {
  Json per_source = Json::object();
  for (const auto& [s, n] : added_per_source) per_source[std::string(SourceName(s))] = n;
  return Json{{"added", added}, {"skipped", skipped}, {"added_per_source", per_source}};
}

std::vector<TraceRecord> ParseRecords(std::istream& in,
                                      std::optional<Source> source_override) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      TraceRecord r = RecordFromJson(Json::parse(line));
      if (source_override) r.source = *source_override;
      out.push_back(std::move(r));
    } catch (const Json::exception& e) {
      throw SchemaError(lineno, e.what());
    } catch (const SerializationError& e) {
      throw SchemaError(lineno, e.what());
    }
  }
  return out;
}

std::string SafeFileStem(std::string_view api) {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : api) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kDigits[c >> 4]);
      out.push_back(kDigits[c & 0xf]);
    }
  }
  // "." and ".." would alias directories.
  if (out == "." || out == "..") out = "%2E" + out.substr(1);
  return out;
}

std::string ApiFileName(std::string_view api) { return SafeFileStem(api) + ".jsonl"; }

SeedStore SeedStore::Open(const fs::path& dir) {
  if (!fs::is_directory(dir))
    throw Error("seed store not found: " + dir.string());
  SeedStore store;
  store.dir_ = dir;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    std::ifstream in(file);
    try {
      for (TraceRecord& r : ParseRecords(in)) store.Insert(std::move(r));
    } catch (const SchemaError& e) {
      throw Error("corrupt store file " + file.string() + ": " + e.what());
    }
  }
  return store;
}

SeedStore SeedStore::OpenOrCreate(const fs::path& dir) {
  fs::create_directories(dir);
  SeedStore store = Open(dir);
  if (!fs::exists(dir / kIndexFile)) store.WriteIndex();
  return store;
}

void SeedStore::Insert(TraceRecord record) {
  if (!ids_.insert(record.id).second) return;
  auto& entry = apis_[record.api];
  entry.developer = entry.developer ||
                    record.developer.value_or(HasInternalMarker(record.api));
  entry.records.push_back(std::move(record));
}

IngestSummary SeedStore::Ingest(std::span<const TraceRecord> records) {
  IngestSummary summary;
  std::map<std::string, std::string> appended;  // file name -> JSONL text
  for (const TraceRecord& r : records) {
    if (ids_.count(r.id)) {
      ++summary.skipped;
      continue;
    }
    Insert(r);
    ++summary.added;
    ++summary.added_per_source[r.source];
    if (dir_) appended[ApiFileName(r.api)] += RecordToJson(r).dump() + "\n";
  }
  if (dir_) {
    for (const auto& [file, text] : appended) {
      std::ofstream out(*dir_ / file, std::ios::app | std::ios::binary);
      out << text;
      if (!out) throw Error("failed to append to " + (*dir_ / file).string());
    }
    WriteIndex();
  }
  return summary;
}

IngestSummary SeedStore::Ingest(std::istream& jsonl,
                                std::optional<Source> source_override) {
  const std::vector<TraceRecord> records = ParseRecords(jsonl, source_override);
  return Ingest(records);
}

TestInput SeedStore::RandomInput(std::string_view api, Rng& rng) const {
  auto it = apis_.find(api);
  if (it == apis_.end() || it->second.records.empty())
    throw UnknownApi(std::string(api));
  const auto& records = it->second.records;
  return records[rng.Below(records.size())].ToTestInput();
}

std::vector<std::string> SeedStore::ListApis(ApiFilter filter) const {
  std::vector<std::string> out;
  for (const auto& [name, entry] : apis_) {
    if (filter == ApiFilter::kAll ||
        (filter == ApiFilter::kDeveloper) == entry.developer)
      out.push_back(name);
  }
  return out;
}

const std::vector<TraceRecord>& SeedStore::Records(std::string_view api) const {
  auto it = apis_.find(api);
  if (it == apis_.end()) throw UnknownApi(std::string(api));
  return it->second.records;
}

bool SeedStore::IsDeveloperApi(std::string_view api) const {
  auto it = apis_.find(api);
  if (it == apis_.end()) throw UnknownApi(std::string(api));
  return it->second.developer;
}

void SeedStore::Export(std::ostream& out) const {
  for (const auto& [name, entry] : apis_)
    for (const TraceRecord& r : entry.records) out << RecordToJson(r).dump() << "\n";
}

Json SeedStore::IndexJson() const {
  Json apis = Json::object();
  std::map<std::string, std::size_t> counts;
  for (const auto& [name, entry] : apis_) {
    Json ids = Json::array();
    for (const TraceRecord& r : entry.records) {
      ids.push_back(r.id);
      ++counts[std::string(SourceName(r.source))];
    }
    apis[name] = {{"ids", std::move(ids)},
                  {"developer", entry.developer},
                  {"file", ApiFileName(name)}};
  }
  return Json{{"apis", std::move(apis)}, {"counts", counts}, {"total", ids_.size()}};
}

void SeedStore::WriteIndex() const {
  const fs::path tmp = *dir_ / (std::string(kIndexFile) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << IndexJson().dump(2) << "\n";
    if (!out) throw Error("failed to write " + tmp.string());
  }
  fs::rename(tmp, *dir_ / kIndexFile);
}

}  // namespace orion
