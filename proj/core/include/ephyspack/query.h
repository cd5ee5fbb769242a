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

#ifndef EPHYSPACK_QUERY_H_
#define EPHYSPACK_QUERY_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ephyspack/container.h"
#include "ephyspack/model.h"

namespace ephyspack {

// Read-only queries over a finalized container. Every function is a pure
// function of the file bytes and safe to call concurrently on one handle.

enum class InventoryKind {
  kTimeSeries,
  kSignalEvents,
  kImageStack,
  kExperimentalEvents,
  kGenericArray,
  kSource,
  kDerivation,
  kGrouping,
};

std::string_view inventory_kind_name(InventoryKind kind);

struct InventoryEntry {
  std::string path;
  InventoryKind kind = InventoryKind::kTimeSeries;
  Extent dims;  // principal dataset shape, payload entities only
  std::optional<double> start_time;
  std::optional<double> duration;
  friend bool operator==(const InventoryEntry&, const InventoryEntry&) = default;
};

// Payload entities, sources and relationship records, sorted by path.
// Entities whose entity_kind is unreadable are skipped.
std::vector<InventoryEntry> inventory(const Container& c);

struct EntityMetadata {
  InventoryEntry summary;
  AttrMap attributes;  // attributes stored on the entity group
  std::vector<std::string> units;
  std::vector<std::string> sources;      // distinct source ids, sorted
  std::vector<std::string> derivations;  // rel ids naming the entity
  std::vector<std::string> groupings;    // group ids containing the entity
  friend bool operator==(const EntityMetadata&, const EntityMetadata&) = default;
};

EntityMetadata entity_metadata(const Container& c, std::string_view path);

// Region of the principal dataset: values, event_times, pixels or data.
ArrayData read_region(const Container& c, std::string_view path, const Extent& offset,
                      const Extent& extent);

std::vector<std::string> entities_by_source(const Container& c, std::string_view source_id,
                                            bool include_descendants);

enum class RelationKind { kDerivedFrom, kGrouping, kReference };
// kOutgoing: the entity points at the related one (it is an input of the
// related output, or the referencing array).
enum class RelationDirection { kOutgoing, kIncoming, kUndirected };

std::string_view relation_kind_name(RelationKind kind);
std::string_view relation_direction_name(RelationDirection direction);

struct Related {
  std::string path;
  RelationKind kind = RelationKind::kDerivedFrom;
  RelationDirection direction = RelationDirection::kUndirected;
  std::string via;  // rel id, group id or reference relation
  auto operator<=>(const Related&) const = default;
};

std::vector<Related> related_entities(const Container& c, std::string_view path);

struct GroupingSummary {
  std::string group_id;
  std::string label;
  std::size_t member_count = 0;
  friend bool operator==(const GroupingSummary&, const GroupingSummary&) = default;
};

struct GroupMember {
  std::string path;
  std::optional<InventoryEntry> entry;
  AttrMap overrides;
  friend bool operator==(const GroupMember&, const GroupMember&) = default;
};

std::vector<GroupingSummary> list_groupings(const Container& c);
// Members in stored order.
std::vector<GroupMember> grouping_members(const Container& c, std::string_view group_id);

using ProvenanceRecord = StoredDerivation;

enum class ChainDirection { kAncestors, kDescendants };

// Transitive closure along derived-from edges, in topological order of the
// data flow (ties broken by rel id).
std::vector<ProvenanceRecord> derivation_chain(const Container& c, std::string_view path,
                                               ChainDirection direction);

// Case-insensitive substring match over activity, agents and parameter
// values; an empty needle matches every record. Sorted by rel id.
std::vector<ProvenanceRecord> search_provenance(const Container& c, std::string_view needle);

}  // namespace ephyspack

#endif  // EPHYSPACK_QUERY_H_
