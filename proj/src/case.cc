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

#include "orion/case.h"

#include "orion/errors.h"
#include "orion/rng.h"

namespace orion {

std::string MakeCaseId(const std::string& api, const std::string& seed_id,
                       const std::vector<MutationNote>& notes,
                       std::uint64_t rng_seed) {
  KeyBuilder k(rng_seed);
  k.Add(api).Add(seed_id);
  for (const MutationNote& n : notes) {
    k.Add(RuleName(n.rule));
    for (std::size_t i : n.affected) k.Add(static_cast<std::uint64_t>(i));
    k.Add(n.seed);
  }
  return HexDigest(k.key());
}

Json GeneratedCase::ToJson() const {
  Json params = Json::array();
  for (const ParamValue& p : input.params) params.push_back(ParamToJson(p));
  Json note_list = Json::array();
  for (const MutationNote& n : notes) note_list.push_back(n.ToJson());
  return Json{{"case_id", case_id},
              {"api", api_name},
              {"seed_id", seed_record_id},
              {"iteration", iteration},
              {"source", SourceName(input.source)},
              {"params", std::move(params)},
              {"notes", std::move(note_list)}};
}

GeneratedCase GeneratedCase::FromJson(const Json& j) {
  try {
    GeneratedCase c;
    c.case_id = j.at("case_id").get<std::string>();
    c.api_name = j.at("api").get<std::string>();
    c.seed_record_id = j.at("seed_id").get<std::string>();
    c.iteration = j.at("iteration").get<std::uint64_t>();
    c.input.api_name = c.api_name;
    c.input.record_id = c.seed_record_id;
    if (auto s = ParseSource(j.value("source", "synthetic"))) c.input.source = *s;
    for (const Json& p : j.at("params")) c.input.params.push_back(ParamFromJson(p));
    for (const Json& n : j.at("notes")) c.notes.push_back(MutationNote::FromJson(n));
    return c;
  } catch (const Json::exception& e) {
    throw SerializationError(std::string("bad case record: ") + e.what());
  }
}

}  // namespace orion
