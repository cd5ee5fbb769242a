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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>

#include "ephyspack/isotime.h"
#include "model_internal.h"

namespace ephyspack {

using namespace detail;

namespace {

constexpr std::string_view kRelPrefix = "rel-";

using Adjacency = std::map<std::string, std::set<std::string>>;

bool reaches(const Adjacency& adj, const std::string& from, const std::set<std::string>& targets) {
  std::vector<std::string> stack{from};
  std::set<std::string> seen;
  while (!stack.empty()) {
    std::string cur = std::move(stack.back());
    stack.pop_back();
    if (targets.contains(cur)) return true;
    if (!seen.insert(cur).second) continue;
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) stack.push_back(next);
  }
  return false;
}

// True when adding rel's input -> output edges would close a cycle.
bool closes_cycle(const Adjacency& adj, const DerivedFrom& rel) {
  std::set<std::string> inputs(rel.inputs.begin(), rel.inputs.end());
  for (const auto& out : rel.outputs) {
    if (reaches(adj, out, inputs)) return true;
  }
  return false;
}

void add_edges(Adjacency& adj, const DerivedFrom& rel) {
  for (const auto& in : rel.inputs) {
    for (const auto& out : rel.outputs) adj[in].insert(out);
  }
}

std::optional<std::uint64_t> rel_number(std::string_view rel_id) {
  if (!rel_id.starts_with(kRelPrefix)) return std::nullopt;
  auto digits = rel_id.substr(kRelPrefix.size());
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) return std::nullopt;
  return n;
}

std::string rel_id_for(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rel-%06llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

void check_derivation(const DerivedFrom& rel, const ModelIndex& index, const std::string& path,
                      Reporter& out) {
  if (rel.inputs.empty() || rel.outputs.empty()) {
    out.report("R005", path, "derivation needs at least one input and one output");
  }
  for (const auto* list : {&rel.inputs, &rel.outputs}) {
    for (const auto& p : *list) {
      if (!index.resolves(p)) {
        out.report("R001", path, "path '" + p + "' does not resolve", AttrMap{{"reference", p}});
      }
    }
  }
  for (const auto& in : rel.inputs) {
    if (std::find(rel.outputs.begin(), rel.outputs.end(), in) != rel.outputs.end()) {
      out.report("R002", path, "'" + in + "' is derived from itself");
    }
  }
  if (rel.agents.empty()) {
    out.report("R003", path, "derivation has no agents");
  } else if (std::any_of(rel.agents.begin(), rel.agents.end(),
                         [](const std::string& a) { return a.empty(); })) {
    out.report("R003", path, "derivation has an empty agent");
  }
  if (rel.activity.empty()) out.report("R004", path, "derivation activity is empty");
  if (!is_iso8601_with_offset(rel.timestamp)) {
    out.report("R009", path, "timestamp '" + rel.timestamp + "' is not ISO 8601 with an offset");
  }
}

void check_derivation_graph(const std::vector<StoredDerivation>& rels, Reporter& out) {
  Adjacency adj;
  for (const auto& r : rels) {
    if (closes_cycle(adj, r.rel)) {
      out.report("R002", "/relations/derived/" + r.rel_id, "derivation closes a cycle");
      continue;
    }
    add_edges(adj, r.rel);
  }
}

void check_grouping(const Grouping& g, const ModelIndex& index, const std::string& path,
                    Reporter& out) {
  if (g.members.empty()) out.report("R006", path, "grouping has no members");
  std::set<std::string> seen;
  for (const auto& m : g.members) {
    if (!seen.insert(m).second) out.report("R006", path, "member '" + m + "' appears twice");
    if (!index.resolves(m)) {
      out.report("R007", path, "member '" + m + "' does not resolve", AttrMap{{"reference", m}});
    }
  }
  for (const auto& [member, attrs] : g.overrides) {
    if (!seen.contains(member)) {
      out.report("R008", path, "override for '" + member + "', which is not a member",
                 AttrMap{{"reference", member}});
    }
  }
}

std::string add_derived_from(Container& c, const DerivedFrom& rel) {
  for (const auto& [k, v] : rel.params) {
    if (k.empty()) throw Error(Errc::kInvalidName, "empty parameter name");
  }
  auto existing = list_derivations(c);
  std::uint64_t next = 1;
  for (const auto& r : existing) {
    if (auto n = rel_number(r.rel_id)) next = std::max(next, *n + 1);
  }
  const std::string rel_id = rel_id_for(next);
  const std::string path = "/relations/derived/" + rel_id;
  Reporter out(Reporter::Mode::kWriter);
  check_derivation(rel, build_index(c), path, out);
  Adjacency adj;
  for (const auto& r : existing) add_edges(adj, r.rel);
  if (closes_cycle(adj, rel)) out.report("R002", path, "derivation would close a cycle");
  return transactional(c, [&] {
    ObjectId derived = require_group_path(c, "/relations/derived");
    ObjectId id = c.create_group(derived, rel_id);
    c.set_attribute(id, "activity", rel.activity);
    c.set_attribute(id, "timestamp", rel.timestamp);
    for (const auto& [k, v] : rel.params) c.set_attribute(id, "param." + k, v);
    put_vector(c, id, "inputs", rel.inputs);
    put_vector(c, id, "outputs", rel.outputs);
    put_vector(c, id, "agents", rel.agents);
    return rel_id;
  });
}

StoredDerivation read_derivation(ReadContext& ctx, std::string_view rel_id) {
  const std::string path = "/relations/derived/" + std::string(rel_id);
  auto id = ctx.c.try_resolve(path);
  if (!id) throw Error(Errc::kNoSuchObject, "no derivation " + std::string(rel_id), path);
  if (ctx.c.kind(*id) != ObjectKind::kGroup) ctx.out.fatal("L002", path, "derivation is not a group");
  StoredDerivation sd;
  sd.rel_id = std::string(rel_id);
  sd.rel.activity = req_attr<std::string>(ctx, *id, "activity");
  sd.rel.timestamp = req_attr<std::string>(ctx, *id, "timestamp");
  sd.rel.params = strip_prefix(ctx.c.attributes(*id), "param.");
  sd.rel.inputs = req_vector<std::string>(ctx, *id, "inputs");
  sd.rel.outputs = req_vector<std::string>(ctx, *id, "outputs");
  sd.rel.agents = req_vector<std::string>(ctx, *id, "agents");
  return sd;
}

std::vector<StoredDerivation> list_derivations(const Container& c) {
  std::vector<StoredDerivation> out;
  auto derived = c.try_resolve("/relations/derived");
  if (!derived) return out;
  Reporter rep(Reporter::Mode::kReader);
  ReadContext ctx{c, rep};
  for (const auto& entry : c.list_children(*derived)) out.push_back(read_derivation(ctx, entry.name));
  return out;
}

void add_grouping(Container& c, const Grouping& g) {
  if (!is_valid_name(g.group_id)) {
    throw Error(Errc::kInvalidName, "invalid group id '" + g.group_id + "'");
  }
  const std::string path = "/relations/groups/" + g.group_id;
  if (c.try_resolve(path)) {
    throw Error(Errc::kDuplicateGroupId, "grouping '" + g.group_id + "' already exists", path);
  }
  Reporter out(Reporter::Mode::kWriter);
  check_grouping(g, build_index(c), path, out);
  transactional(c, [&] {
    ObjectId groups = require_group_path(c, "/relations/groups");
    ObjectId id = c.create_group(groups, g.group_id);
    c.set_attribute(id, "label", g.label);
    put_vector(c, id, "members", g.members);
    ObjectId ov = c.create_group(id, "overrides");
    for (std::size_t k = 0; k < g.members.size(); ++k) {
      auto it = g.overrides.find(g.members[k]);
      if (it == g.overrides.end()) continue;
      ObjectId o = c.create_group(ov, std::to_string(k));
      c.set_attribute(o, "member", g.members[k]);
      for (const auto& [key, v] : it->second) c.set_attribute(o, "value." + key, v);
    }
  });
}

Grouping read_grouping(ReadContext& ctx, std::string_view group_id) {
  const std::string path = "/relations/groups/" + std::string(group_id);
  auto id = ctx.c.try_resolve(path);
  if (!id || split_path(path).size() != 3) {
    throw Error(Errc::kNoSuchGroup, "no grouping '" + std::string(group_id) + "'", path);
  }
  if (ctx.c.kind(*id) != ObjectKind::kGroup) ctx.out.fatal("L002", path, "grouping is not a group");
  Grouping g;
  g.group_id = std::string(group_id);
  g.label = req_attr<std::string>(ctx, *id, "label");
  g.members = req_vector<std::string>(ctx, *id, "members");
  ObjectId ov = require_child_group(ctx, *id, "overrides");
  for (const auto& entry : ctx.c.list_children(ov)) {
    if (entry.kind != ObjectKind::kGroup) {
      ctx.out.fatal("L005", path + "/overrides/" + entry.name, "override is not a group");
    }
    auto member = req_attr<std::string>(ctx, entry.id, "member");
    g.overrides[member] = strip_prefix(ctx.c.attributes(entry.id), "value.");
  }
  return g;
}

Grouping read_grouping(const Container& c, std::string_view group_id) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_grouping(ctx, group_id);
}

std::vector<Grouping> read_groupings(const Container& c) {
  std::vector<Grouping> out;
  auto groups = c.try_resolve("/relations/groups");
  if (!groups) return out;
  for (const auto& entry : c.list_children(*groups)) out.push_back(read_grouping(c, entry.name));
  return out;
}

}  // namespace ephyspack
