// Copyright 2026 The ephyspack Authors.
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

#ifndef EPHYSPACK_JSONL_H_
#define EPHYSPACK_JSONL_H_

#include <optional>
#include <string>

#include "ephyspack/model.h"
#include "ephyspack/query.h"
#include "ephyspack/validate.h"

namespace ephyspack {

// One compact JSON object per call, without a trailing newline. Keys come out
// sorted; non-finite numbers become null. Where a session start is given,
// times gain an "_iso" companion resolved against it.

std::string to_json(const AttrMap& attrs);
std::string to_json(const ArrayData& data);
std::string to_json(const Finding& f);
std::string to_json(const ValidationReport& report);  // summary counts only
std::string to_json(const GlobalMetadata& meta);
std::string to_json(const InventoryEntry& e, const std::optional<std::string>& session_start = {});
std::string to_json(const EntityMetadata& m, const std::optional<std::string>& session_start = {});
std::string to_json(const Related& r);
std::string to_json(const GroupingSummary& g);
std::string to_json(const GroupMember& m);
std::string to_json(const ProvenanceRecord& r);

// session_start + seconds in ISO 8601; nullopt when session_start does not
// parse or t is not finite.
std::optional<std::string> resolve_time(const std::string& session_start, double t);

}  // namespace ephyspack

#endif  // EPHYSPACK_JSONL_H_
