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

#ifndef ORION_CASE_H_
#define ORION_CASE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "orion/rules.h"
#include "orion/value.h"

namespace orion {

// One mutated invocation, ready to render and execute.
struct GeneratedCase {
  // HexDigest of (api, seed id, rule trace, rng seed). Doubles as the replay
  // key.
  std::string case_id;
  std::string api_name;
  std::string seed_record_id;
  std::uint64_t iteration = 0;
  // The mutated input; api_name and record_id mirror the fields above.
  TestInput input;
  // One note per applied rule; empty for an unmutated seed.
  std::vector<MutationNote> notes;

  std::vector<RuleId> rules() const {
    std::vector<RuleId> out;
    for (const MutationNote& n : notes) out.push_back(n.rule);
    return out;
  }

  Json ToJson() const;
  static GeneratedCase FromJson(const Json& j);
};

std::string MakeCaseId(const std::string& api, const std::string& seed_id,
                       const std::vector<MutationNote>& notes,
                       std::uint64_t rng_seed);

}  // namespace orion

#endif  // ORION_CASE_H_
