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

#include "ephyspack/jsonl.h"

#include <cmath>

#include "ephyspack/isotime.h"
#include "json.hpp"

namespace ephyspack {
namespace {

using json = nlohmann::json;

json number(double d) { return std::isfinite(d) ? json(d) : json(nullptr); }

json attr_json(const AttrValue& v) {
  struct Visitor {
    json operator()(const std::string& s) const { return s; }
    json operator()(double d) const { return number(d); }
    json operator()(std::int64_t i) const { return i; }
    json operator()(std::uint64_t u) const { return u; }
    json operator()(bool b) const { return b; }
    json operator()(const std::vector<double>& v) const {
      json a = json::array();
      for (double d : v) a.push_back(number(d));
      return a;
    }
    json operator()(const std::vector<std::string>& v) const { return v; }
  };
  return std::visit(Visitor{}, v);
}

json attrs_json(const AttrMap& attrs) {
  json o = json::object();
  for (const auto& [k, v] : attrs) o[k] = attr_json(v);
  return o;
}

json array_json(const ArrayData& data) {
  return std::visit(
      [](const auto& v) {
        using T = typename std::decay_t<decltype(v)>::value_type;
        json a = json::array();
        for (const auto& x : v) {
          if constexpr (std::is_floating_point_v<T>) {
            a.push_back(number(static_cast<double>(x)));
          } else {
            a.push_back(x);
          }
        }
        return a;
      },
      data);
}

void put_time(json& o, const std::string& key, std::optional<double> t,
              const std::optional<std::string>& session_start) {
  if (!t) return;
  o[key] = number(*t);
  if (session_start) {
    if (auto iso = resolve_time(*session_start, *t)) o[key + "_iso"] = *iso;
  }
}

json entry_json(const InventoryEntry& e, const std::optional<std::string>& session_start) {
  json o = {{"path", e.path}, {"kind", std::string(inventory_kind_name(e.kind))}};
  if (e.kind != InventoryKind::kSource && e.kind != InventoryKind::kDerivation &&
      e.kind != InventoryKind::kGrouping) {
    o["dims"] = e.dims;
  }
  put_time(o, "start_time", e.start_time, session_start);
  if (e.duration) o["duration"] = number(*e.duration);
  return o;
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

std::optional<std::string> resolve_time(const std::string& session_start, double t) {
  auto base = IsoTime::parse(session_start);
  if (!base || !std::isfinite(t)) return std::nullopt;
  return base->plus_seconds(t).to_string();
}

std::string to_json(const AttrMap& attrs) { return dump(attrs_json(attrs)); }

std::string to_json(const ArrayData& data) { return dump(array_json(data)); }

std::string to_json(const Finding& f) {
  return dump({{"severity", std::string(severity_name(f.severity))},
               {"code", f.code},
               {"path", f.path},
               {"message", f.message},
               {"detail", attrs_json(f.detail)}});
}

std::string to_json(const ValidationReport& r) {
  return dump({{"errors", r.errors},
               {"warnings", r.warnings},
               {"infos", r.infos},
               {"checked_rules", r.checked_rules}});
}

std::string to_json(const GlobalMetadata& m) {
  return dump({{"format_version", std::to_string(m.format_version.major) + "." +
                                      std::to_string(m.format_version.minor)},
               {"file_uuid", m.file_uuid},
               {"session_start", m.session_start},
               {"identification", m.identification}});
}

std::string to_json(const InventoryEntry& e, const std::optional<std::string>& session_start) {
  return dump(entry_json(e, session_start));
}

std::string to_json(const EntityMetadata& m, const std::optional<std::string>& session_start) {
  json o = entry_json(m.summary, session_start);
  o["attributes"] = attrs_json(m.attributes);
  o["units"] = m.units;
  o["sources"] = m.sources;
  o["derivations"] = m.derivations;
  o["groupings"] = m.groupings;
  return dump(o);
}

std::string to_json(const Related& r) {
  return dump({{"path", r.path},
               {"relation", std::string(relation_kind_name(r.kind))},
               {"direction", std::string(relation_direction_name(r.direction))},
               {"via", r.via}});
}

std::string to_json(const GroupingSummary& g) {
  return dump({{"group_id", g.group_id}, {"label", g.label}, {"member_count", g.member_count}});
}

std::string to_json(const GroupMember& m) {
  json o = {{"path", m.path}, {"overrides", attrs_json(m.overrides)}};
  o["entry"] = m.entry ? entry_json(*m.entry, std::nullopt) : json(nullptr);
  return dump(o);
}

std::string to_json(const ProvenanceRecord& r) {
  return dump({{"rel_id", r.rel_id},
               {"inputs", r.rel.inputs},
               {"outputs", r.rel.outputs},
               {"activity", r.rel.activity},
               {"agents", r.rel.agents},
               {"params", attrs_json(r.rel.params)},
               {"timestamp", r.rel.timestamp}});
}

}  // namespace ephyspack
