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

// File-backed store of recorded API invocations (seeds).
//
// Layout:
//   <dir>/<api>.jsonl   append-only, one record per line
//   <dir>/index.json    api -> record ids, developer flag, per-source counts
//
// The JSONL files are authoritative; the index is rewritten after every
// ingest and rebuilt from the files on open.

#ifndef ORION_SEED_STORE_H_
#define ORION_SEED_STORE_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "orion/rng.h"
#include "orion/value.h"

namespace orion {

struct TraceRecord {
  std::string api;
  std::vector<ParamValue> params;
  Source source = Source::kSynthetic;
  std::optional<std::string> timestamp;
  // Developer (internal) API. Absent means "derive from the name".
  std::optional<bool> developer;
  std::string id;

  TestInput ToTestInput() const;
};

// Stable content hash of (api, canonical params serialization).
std::string RecordId(std::string_view api, std::span<const ParamValue> params);

Json RecordToJson(const TraceRecord& r);
// Throws SerializationError. The id is always recomputed from content.
TraceRecord RecordFromJson(const Json& j);

// True when some dotted component of the name starts with '_'.
bool HasInternalMarker(std::string_view api);

enum class ApiFilter { kEndUser, kDeveloper, kAll };
std::optional<ApiFilter> ParseApiFilter(std::string_view name);

struct IngestSummary {
  std::size_t added = 0;
  std::size_t skipped = 0;
  std::map<Source, std::size_t> added_per_source;

  Json ToJson() const;
};

// Parses JSONL into records. Blank lines are ignored. Throws SchemaError
// carrying the 1-based line number of the first malformed line.
std::vector<TraceRecord> ParseRecords(std::istream& in,
                                      std::optional<Source> source_override = {});

class SeedStore {
 public:
  // An in-memory store that is never persisted.
  SeedStore() = default;

  // Opens an existing store directory. Throws Error if it does not exist.
  static SeedStore Open(const std::filesystem::path& dir);
  static SeedStore OpenOrCreate(const std::filesystem::path& dir);

  // Deduplicated by record id. The whole batch is validated before anything
  // is written.
  IngestSummary Ingest(std::span<const TraceRecord> records);
  IngestSummary Ingest(std::istream& jsonl,
                       std::optional<Source> source_override = {});

  // Uniform over the stored records of `api`. Throws UnknownApi.
  TestInput RandomInput(std::string_view api, Rng& rng) const;

  // Sorted, unique.
  std::vector<std::string> ListApis(ApiFilter filter) const;

  const std::vector<TraceRecord>& Records(std::string_view api) const;
  std::size_t size() const { return ids_.size(); }
  bool IsDeveloperApi(std::string_view api) const;

  // Every record as JSONL, grouped by api in name order.
  void Export(std::ostream& out) const;

  Json IndexJson() const;
  const std::optional<std::filesystem::path>& dir() const { return dir_; }

 private:
  struct ApiEntry {
    bool developer = false;
    std::vector<TraceRecord> records;
  };

  void Insert(TraceRecord record);
  void WriteIndex() const;

  std::optional<std::filesystem::path> dir_;
  std::map<std::string, ApiEntry, std::less<>> apis_;
  std::set<std::string> ids_;
};

// Escapes a name for use as a path component: [A-Za-z0-9._-] kept, other
// bytes %XX.
std::string SafeFileStem(std::string_view name);

// The store file holding the records of `api`.
std::string ApiFileName(std::string_view api);

}  // namespace orion

#endif  // ORION_SEED_STORE_H_
