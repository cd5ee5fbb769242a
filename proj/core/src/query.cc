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

#include "ephyspack/query.h"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <set>

namespace ephyspack {
namespace {

std::optional<double> f64_attr(const Container& c, ObjectId id, std::string_view key) {
  auto v = c.find_attribute(id, key);
  if (!v) return std::nullopt;
  if (auto* d = std::get_if<double>(&*v)) return *d;
  return std::nullopt;
}

std::optional<std::string> str_attr(const Container& c, ObjectId id, std::string_view key) {
  auto v = c.find_attribute(id, key);
  if (!v) return std::nullopt;
  if (auto* s = std::get_if<std::string>(&*v)) return *s;
  return std::nullopt;
}

std::string_view principal_dataset(EntityKind kind) {
  switch (kind) {
    case EntityKind::kTimeSeries:
      return "values";
    case EntityKind::kSignalEvents:
    case EntityKind::kExperimentalEvents:
      return "event_times";
    case EntityKind::kImageStack:
      return "pixels";
    case EntityKind::kGenericArray:
      return "data";
  }
  return "data";
}

InventoryKind to_inventory_kind(EntityKind kind) {
  switch (kind) {
    case EntityKind::kTimeSeries:
      return InventoryKind::kTimeSeries;
    case EntityKind::kSignalEvents:
      return InventoryKind::kSignalEvents;
    case EntityKind::kImageStack:
      return InventoryKind::kImageStack;
    case EntityKind::kExperimentalEvents:
      return InventoryKind::kExperimentalEvents;
    case EntityKind::kGenericArray:
      return InventoryKind::kGenericArray;
  }
  return InventoryKind::kGenericArray;
}

std::optional<ObjectId> dataset_child(const Container& c, ObjectId group, std::string_view name) {
  auto id = c.find_child(group, name);
  if (id && c.kind(*id) == ObjectKind::kDataset) return id;
  return std::nullopt;
}

std::vector<std::string> strings_of(const Container& c, ObjectId group, std::string_view name) {
  auto id = dataset_child(c, group, name);
  if (!id || c.dataset_info(*id).dtype != DType::kUtf8) return {};
  return c.read_all_as<std::string>(*id);
}

InventoryEntry payload_entry(const Container& c, ObjectId id, EntityKind kind) {
  InventoryEntry e;
  e.path = c.path_of(id);
  e.kind = to_inventory_kind(kind);
  if (auto ds = dataset_child(c, id, principal_dataset(kind))) e.dims = c.dataset_info(*ds).shape;
  switch (kind) {
    case EntityKind::kTimeSeries:
    case EntityKind::kSignalEvents:
    case EntityKind::kImageStack:
      e.start_time = f64_attr(c, id, "start_time");
      e.duration = f64_attr(c, id, "duration");
      break;
    case EntityKind::kExperimentalEvents: {
      auto lo = f64_attr(c, id, "monitor_start");
      auto hi = f64_attr(c, id, "monitor_end");
      e.start_time = lo;
      if (lo && hi) e.duration = *hi - *lo;
      break;
    }
    case EntityKind::kGenericArray:
      break;
  }
  return e;
}

std::vector<ChildEntry> groups_under(const Container& c, std::string_view path) {
  std::vector<ChildEntry> out;
  auto id = c.try_resolve(path);
  if (!id || c.kind(*id) != ObjectKind::kGroup) return out;
  for (auto& child : c.list_children(*id)) {
    if (child.kind == ObjectKind::kGroup) out.push_back(std::move(child));
  }
  return out;
}

// Payload entity group and its kind, or NoSuchEntity.
std::pair<ObjectId, EntityKind> require_entity(const Container& c, std::string_view path) {
  auto id = c.try_resolve(path);
  std::optional<EntityKind> kind;
  if (id && c.kind(*id) == ObjectKind::kGroup && c.parent(*id) != kRootId &&
      c.path_of(c.parent(*id)) == "/data") {
    if (auto name = str_attr(c, *id, "entity_kind")) kind = parse_entity_kind(*name);
  }
  if (!kind) throw Error(Errc::kNoSuchEntity, "no payload entity at " + std::string(path), std::string(path));
  return {*id, *kind};
}

std::vector<std::string> entity_sources(const Container& c, ObjectId id, EntityKind kind) {
  switch (kind) {
    case EntityKind::kTimeSeries:
    case EntityKind::kImageStack: {
      // One entry per channel on disk; callers get the distinct set.
      auto v = strings_of(c, id, "sources");
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      return v;
    }
    case EntityKind::kSignalEvents: {
      // Session channels plus every per-event channel list, deduplicated.
      std::set<std::string> all;
      for (auto& s : strings_of(c, id, "source_channels")) all.insert(std::move(s));
      if (auto props = c.find_child(id, "props"); props && c.kind(*props) == ObjectKind::kGroup) {
        for (const auto& set : c.list_children(*props)) {
          if (set.kind != ObjectKind::kGroup) continue;
          for (auto& s : strings_of(c, set.id, "channels")) all.insert(std::move(s));
        }
      }
      return {all.begin(), all.end()};
    }
    default:
      return {};
  }
}

void add_unit(std::vector<std::string>& units, std::optional<std::string> u) {
  if (u && !u->empty()) units.push_back(std::move(*u));
}

std::vector<std::string> entity_units(const Container& c, ObjectId id, EntityKind kind) {
  std::vector<std::string> units;
  switch (kind) {
    case EntityKind::kTimeSeries:
      add_unit(units, str_attr(c, id, "unit"));
      for (auto& u : strings_of(c, id, "units")) add_unit(units, std::move(u));
      break;
    case EntityKind::kSignalEvents: {
      add_unit(units, str_attr(c, id, "trigger.unit"));
      if (auto t = dataset_child(c, id, "templates")) add_unit(units, str_attr(c, *t, "unit"));
      if (auto trig = c.find_child(id, "triggers"); trig && c.kind(*trig) == ObjectKind::kGroup) {
        for (auto& u : strings_of(c, *trig, "unit")) add_unit(units, std::move(u));
      }
      if (auto props = c.find_child(id, "props"); props && c.kind(*props) == ObjectKind::kGroup) {
        for (const auto& set : c.list_children(*props)) {
          if (set.kind != ObjectKind::kGroup) continue;
          if (auto wf = c.find_child(set.id, "waveforms")) add_unit(units, str_attr(c, *wf, "unit"));
        }
      }
      break;
    }
    case EntityKind::kImageStack:
      add_unit(units, str_attr(c, id, "pixel_unit"));
      break;
    case EntityKind::kExperimentalEvents:
      if (auto props = c.find_child(id, "props"); props && c.kind(*props) == ObjectKind::kGroup) {
        for (const auto& p : c.list_children(*props)) {
          if (p.kind == ObjectKind::kGroup) add_unit(units, str_attr(c, p.id, "unit"));
        }
      }
      break;
    case EntityKind::kGenericArray:
      for (auto& u : strings_of(c, id, "dim_units")) add_unit(units, std::move(u));
      break;
  }
  std::sort(units.begin(), units.end());
  units.erase(std::unique(units.begin(), units.end()), units.end());
  return units;
}

struct GaReference {
  std::string array;
  std::string target;
  std::string relation;
};

std::vector<GaReference> array_references(const Container& c) {
  std::vector<GaReference> out;
  for (const auto& entry : groups_under(c, "/data")) {
    if (str_attr(c, entry.id, "entity_kind") != entity_kind_name(EntityKind::kGenericArray)) continue;
    auto refs = c.find_child(entry.id, "references");
    if (!refs || c.kind(*refs) != ObjectKind::kGroup) continue;
    auto paths = strings_of(c, *refs, "paths");
    auto relations = strings_of(c, *refs, "relations");
    for (std::size_t i = 0; i < paths.size(); ++i) {
      out.push_back({c.path_of(entry.id), paths[i], i < relations.size() ? relations[i] : ""});
    }
  }
  return out;
}

bool names(const DerivedFrom& rel, std::string_view path) {
  auto has = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), path) != v.end();
  };
  return has(rel.inputs) || has(rel.outputs);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::string_view inventory_kind_name(InventoryKind kind) {
  switch (kind) {
    case InventoryKind::kTimeSeries:
      return "TimeSeries";
    case InventoryKind::kSignalEvents:
      return "SignalEvents";
    case InventoryKind::kImageStack:
      return "ImageStack";
    case InventoryKind::kExperimentalEvents:
      return "ExperimentalEvents";
    case InventoryKind::kGenericArray:
      return "GenericArray";
    case InventoryKind::kSource:
      return "Source";
    case InventoryKind::kDerivation:
      return "DerivedFrom";
    case InventoryKind::kGrouping:
      return "Grouping";
  }
  return "?";
}

std::string_view relation_kind_name(RelationKind kind) {
  switch (kind) {
    case RelationKind::kDerivedFrom:
      return "derived_from";
    case RelationKind::kGrouping:
      return "grouping";
    case RelationKind::kReference:
      return "reference";
  }
  return "?";
}

std::string_view relation_direction_name(RelationDirection direction) {
  switch (direction) {
    case RelationDirection::kOutgoing:
      return "outgoing";
    case RelationDirection::kIncoming:
      return "incoming";
    case RelationDirection::kUndirected:
      return "undirected";
  }
  return "?";
}

std::vector<InventoryEntry> inventory(const Container& c) {
  std::vector<InventoryEntry> out;
  for (const auto& entry : groups_under(c, "/data")) {
    auto name = str_attr(c, entry.id, "entity_kind");
    auto kind = name ? parse_entity_kind(*name) : std::nullopt;
    if (kind) out.push_back(payload_entry(c, entry.id, *kind));
  }
  for (const auto& entry : groups_under(c, "/sources")) {
    out.push_back({c.path_of(entry.id), InventoryKind::kSource, {}, {}, {}});
  }
  for (const auto& entry : groups_under(c, "/relations/derived")) {
    out.push_back({c.path_of(entry.id), InventoryKind::kDerivation, {}, {}, {}});
  }
  for (const auto& entry : groups_under(c, "/relations/groups")) {
    out.push_back({c.path_of(entry.id), InventoryKind::kGrouping, {}, {}, {}});
  }
  std::sort(out.begin(), out.end(),
            [](const InventoryEntry& a, const InventoryEntry& b) { return a.path < b.path; });
  return out;
}

EntityMetadata entity_metadata(const Container& c, std::string_view path) {
  auto [id, kind] = require_entity(c, path);
  EntityMetadata m;
  m.summary = payload_entry(c, id, kind);
  m.attributes = c.attributes(id);
  m.units = entity_units(c, id, kind);
  m.sources = entity_sources(c, id, kind);
  for (const auto& sd : list_derivations(c)) {
    if (names(sd.rel, path)) m.derivations.push_back(sd.rel_id);
  }
  for (const auto& g : read_groupings(c)) {
    if (std::find(g.members.begin(), g.members.end(), path) != g.members.end()) {
      m.groupings.push_back(g.group_id);
    }
  }
  return m;
}

ArrayData read_region(const Container& c, std::string_view path, const Extent& offset,
                      const Extent& extent) {
  auto [id, kind] = require_entity(c, path);
  auto ds = dataset_child(c, id, principal_dataset(kind));
  if (!ds) {
    throw Error(Errc::kNoSuchObject, "entity has no " + std::string(principal_dataset(kind)) + " dataset",
                std::string(path));
  }
  return c.read_slab(*ds, offset, extent);
}

std::vector<std::string> entities_by_source(const Container& c, std::string_view source_id,
                                            bool include_descendants) {
  const ModelIndex index = build_index(c);
  if (!index.has_source(source_id)) {
    throw Error(Errc::kNoSuchSource, "no source " + std::string(source_id), source_path(source_id));
  }
  std::set<std::string, std::less<>> wanted{std::string(source_id)};
  if (include_descendants) {
    for (const auto& [id, kind] : index.sources) {
      // Walk up the parent chain; the depth bound guards against cycles.
      std::string cur = id;
      for (std::size_t depth = 0; depth <= index.sources.size(); ++depth) {
        if (cur == source_id) {
          wanted.insert(id);
          break;
        }
        auto it = index.source_parents.find(cur);
        if (it == index.source_parents.end()) break;
        cur = it->second;
      }
    }
  }
  std::vector<std::string> out;
  for (const auto& [path, rec] : index.entities) {
    if (!rec.kind) continue;
    const ObjectId id = c.resolve(path);
    for (const auto& s : entity_sources(c, id, *rec.kind)) {
      if (wanted.contains(s)) {
        out.push_back(path);
        break;
      }
    }
  }
  return out;
}

std::vector<Related> related_entities(const Container& c, std::string_view path) {
  require_entity(c, path);
  std::set<Related> out;
  for (const auto& sd : list_derivations(c)) {
    const auto& r = sd.rel;
    const bool is_in = std::find(r.inputs.begin(), r.inputs.end(), path) != r.inputs.end();
    const bool is_out = std::find(r.outputs.begin(), r.outputs.end(), path) != r.outputs.end();
    if (is_in) {
      for (const auto& o : r.outputs) {
        out.insert({o, RelationKind::kDerivedFrom, RelationDirection::kOutgoing, sd.rel_id});
      }
    }
    if (is_out) {
      for (const auto& i : r.inputs) {
        out.insert({i, RelationKind::kDerivedFrom, RelationDirection::kIncoming, sd.rel_id});
      }
    }
  }
  for (const auto& g : read_groupings(c)) {
    if (std::find(g.members.begin(), g.members.end(), path) == g.members.end()) continue;
    for (const auto& m : g.members) {
      out.insert({m, RelationKind::kGrouping, RelationDirection::kUndirected, g.group_id});
    }
  }
  for (const auto& ref : array_references(c)) {
    if (ref.array == path) {
      out.insert({ref.target, RelationKind::kReference, RelationDirection::kOutgoing, ref.relation});
    }
    if (ref.target == path) {
      out.insert({ref.array, RelationKind::kReference, RelationDirection::kIncoming, ref.relation});
    }
  }
  std::vector<Related> result;
  for (const auto& r : out) {
    if (r.path != path) result.push_back(r);
  }
  return result;
}

std::vector<GroupingSummary> list_groupings(const Container& c) {
  std::vector<GroupingSummary> out;
  for (const auto& g : read_groupings(c)) out.push_back({g.group_id, g.label, g.members.size()});
  return out;
}

std::vector<GroupMember> grouping_members(const Container& c, std::string_view group_id) {
  const Grouping g = read_grouping(c, group_id);
  std::map<std::string, InventoryEntry, std::less<>> entries;
  for (auto& e : inventory(c)) entries.emplace(e.path, std::move(e));
  std::vector<GroupMember> out;
  for (const auto& m : g.members) {
    GroupMember gm{m, {}, {}};
    if (auto it = entries.find(m); it != entries.end()) gm.entry = it->second;
    if (auto it = g.overrides.find(m); it != g.overrides.end()) gm.overrides = it->second;
    out.push_back(std::move(gm));
  }
  return out;
}

std::vector<ProvenanceRecord> derivation_chain(const Container& c, std::string_view path,
                                               ChainDirection direction) {
  if (!build_index(c).resolves(path)) {
    throw Error(Errc::kNoSuchEntity, "no entity at " + std::string(path), std::string(path));
  }
  const auto all = list_derivations(c);
  const bool up = direction == ChainDirection::kAncestors;
  std::set<std::size_t> chosen;
  std::set<std::string, std::less<>> seen{std::string(path)};
  std::vector<std::string> frontier{std::string(path)};
  while (!frontier.empty()) {
    const std::string cur = std::move(frontier.back());
    frontier.pop_back();
    for (std::size_t k = 0; k < all.size(); ++k) {
      const auto& near = up ? all[k].rel.outputs : all[k].rel.inputs;
      if (std::find(near.begin(), near.end(), cur) == near.end()) continue;
      chosen.insert(k);
      for (const auto& next : up ? all[k].rel.inputs : all[k].rel.outputs) {
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
  }

  // Kahn's algorithm over the chosen records: A precedes B when an output of
  // A is an input of B. list_derivations is sorted by rel id, so indices
  // order ties.
  std::map<std::size_t, std::set<std::size_t>> succ;
  std::map<std::size_t, std::size_t> indegree;
  for (auto a : chosen) indegree[a] += 0;
  for (auto a : chosen) {
    for (auto b : chosen) {
      if (a == b) continue;
      const auto& outs = all[a].rel.outputs;
      const auto& ins = all[b].rel.inputs;
      const bool feeds = std::any_of(outs.begin(), outs.end(), [&](const std::string& o) {
        return std::find(ins.begin(), ins.end(), o) != ins.end();
      });
      if (feeds && succ[a].insert(b).second) ++indegree[b];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (auto [k, d] : indegree) {
    if (d == 0) ready.push(k);
  }
  std::vector<ProvenanceRecord> out;
  while (!ready.empty()) {
    const auto k = ready.top();
    ready.pop();
    out.push_back(all[k]);
    for (auto b : succ[k]) {
      if (--indegree[b] == 0) ready.push(b);
    }
  }
  return out;
}

std::vector<ProvenanceRecord> search_provenance(const Container& c, std::string_view needle) {
  const std::string n = lower(needle);
  auto hit = [&](std::string_view text) { return lower(text).find(n) != std::string::npos; };
  std::vector<ProvenanceRecord> out;
  for (auto& sd : list_derivations(c)) {
    bool match = hit(sd.rel.activity);
    for (const auto& a : sd.rel.agents) match = match || hit(a);
    for (const auto& [k, v] : sd.rel.params) match = match || hit(attr_to_string(v));
    if (match) out.push_back(std::move(sd));
  }
  return out;
}

}  // namespace ephyspack
