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

#include "ephyspack/isotime.h"
#include "model_internal.h"

namespace ephyspack {

std::string_view entity_kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kTimeSeries:
      return "time_series";
    case EntityKind::kSignalEvents:
      return "signal_events";
    case EntityKind::kImageStack:
      return "image_stack";
    case EntityKind::kExperimentalEvents:
      return "experimental_events";
    case EntityKind::kGenericArray:
      return "generic_array";
  }
  return "?";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  for (auto k : {EntityKind::kTimeSeries, EntityKind::kSignalEvents, EntityKind::kImageStack,
                 EntityKind::kExperimentalEvents, EntityKind::kGenericArray}) {
    if (entity_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

std::string entity_path(std::string_view name) { return "/data/" + std::string(name); }
std::string source_path(std::string_view id) { return "/sources/" + std::string(id); }

bool ModelIndex::resolves(std::string_view path) const {
  if (entities.contains(std::string(path))) return true;
  constexpr std::string_view prefix = "/sources/";
  return path.starts_with(prefix) && has_source(path.substr(prefix.size()));
}

void ensure_layout(Container& c) {
  auto group = [&c](ObjectId parent, std::string_view name) {
    if (auto id = c.find_child(parent, name)) return *id;
    return c.create_group(parent, name);
  };
  group(kRootId, kSourcesGroup);
  group(kRootId, kDataGroup);
  ObjectId rel = group(kRootId, kRelationsGroup);
  group(rel, kDerivedGroup);
  group(rel, kGroupsGroup);
  group(kRootId, kExtGroup);
}

ModelIndex build_index(const Container& c) {
  ModelIndex index;
  if (auto sources = c.find_child(kRootId, kSourcesGroup);
      sources && c.kind(*sources) == ObjectKind::kGroup) {
    for (const auto& child : c.list_children(*sources)) {
      if (child.kind != ObjectKind::kGroup) continue;
      std::optional<SourceKind> kind;
      if (auto v = c.find_attribute(child.id, "kind")) {
        if (auto* s = std::get_if<std::string>(&*v)) kind = parse_source_kind(*s);
      }
      index.sources.emplace(child.name, kind);
      if (auto v = c.find_attribute(child.id, "parent")) {
        if (auto* s = std::get_if<std::string>(&*v)) index.source_parents.emplace(child.name, *s);
      }
    }
  }
  if (auto data = c.find_child(kRootId, kDataGroup); data && c.kind(*data) == ObjectKind::kGroup) {
    for (const auto& child : c.list_children(*data)) {
      if (child.kind != ObjectKind::kGroup) continue;
      EntityRecord rec{entity_path(child.name), std::nullopt};
      if (auto v = c.find_attribute(child.id, "entity_kind")) {
        if (auto* s = std::get_if<std::string>(&*v)) rec.kind = parse_entity_kind(*s);
      }
      index.entities.emplace(rec.path, rec);
    }
  }
  return index;
}

std::optional<EntityKind> entity_kind_at(const Container& c, std::string_view path) {
  auto parts = split_path(path);
  if (parts.size() != 2 || parts[0] != kDataGroup) return std::nullopt;
  auto id = c.try_resolve(path);
  if (!id || c.kind(*id) != ObjectKind::kGroup) return std::nullopt;
  auto v = c.find_attribute(*id, "entity_kind");
  if (!v) return std::nullopt;
  auto* s = std::get_if<std::string>(&*v);
  return s ? parse_entity_kind(*s) : std::nullopt;
}

namespace detail {

std::string fmt(double v) { return attr_to_string(AttrValue(v)); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

Extent default_chunk_shape(DType dtype, const Extent& shape) {
  Extent chunk(shape.size());
  if (shape.empty()) return chunk;
  if (dtype == DType::kUtf8) {
    chunk[0] = std::clamp<std::uint64_t>(shape[0], 1, 1024);
    return chunk;
  }
  std::uint64_t row = 1;
  for (std::size_t d = 1; d < shape.size(); ++d) {
    chunk[d] = std::max<std::uint64_t>(shape[d], 1);
    row *= chunk[d];
  }
  const std::uint64_t target = 65536 / dtype_size(dtype);
  const std::uint64_t rows = std::max<std::uint64_t>(1, target / std::max<std::uint64_t>(row, 1));
  chunk[0] = std::clamp<std::uint64_t>(shape[0], 1, rows);
  return chunk;
}

ObjectId put_dataset(Container& c, ObjectId parent, std::string_view name, const ArrayData& data,
                     const Extent& shape) {
  DType dtype = dtype_of(data);
  ObjectId id = c.create_dataset(parent, name, dtype, shape, default_chunk_shape(dtype, shape));
  if (product(shape) > 0) c.write_all(id, data);
  return id;
}

ObjectId put_tensor(Container& c, ObjectId parent, std::string_view name, const Tensor& t) {
  return put_dataset(c, parent, name, t.data, t.shape);
}

ObjectId require_group_path(Container& c, std::string_view path) {
  ensure_layout(c);
  return c.resolve(path);
}

ObjectId group_for_new_entity(Container& c, std::string_view name, std::string_view kind_name) {
  if (!is_valid_name(name)) {
    throw Error(Errc::kInvalidName, "invalid entity name '" + std::string(name) + "'");
  }
  ObjectId data = require_group_path(c, "/data");
  ObjectId id = c.create_group(data, name);
  c.set_attribute(id, "entity_kind", std::string(kind_name));
  return id;
}

ObjectId require_object(ReadContext& ctx, std::string_view path, std::string_view code) {
  auto id = ctx.c.try_resolve(path);
  if (!id) ctx.out.fatal(code, std::string(path), "object is missing");
  return *id;
}

std::optional<ObjectId> child(ReadContext& ctx, ObjectId parent, std::string_view name) {
  return ctx.c.find_child(parent, name);
}

std::optional<ObjectId> child_group(ReadContext& ctx, ObjectId parent, std::string_view name) {
  auto id = ctx.c.find_child(parent, name);
  if (!id) return std::nullopt;
  if (ctx.c.kind(*id) != ObjectKind::kGroup) {
    ctx.out.fatal("L005", ctx.c.path_of(*id), "expected a group, found a dataset");
  }
  return id;
}

ObjectId require_child_group(ReadContext& ctx, ObjectId parent, std::string_view name) {
  auto id = child_group(ctx, parent, name);
  if (!id) {
    ctx.out.fatal("L005", join_path(ctx.c.path_of(parent), name), "required group is missing");
  }
  return *id;
}

std::optional<Tensor> opt_dataset(ReadContext& ctx, ObjectId parent, std::string_view name,
                                  const std::function<bool(DType)>& dtype_ok, int rank) {
  auto id = ctx.c.find_child(parent, name);
  if (!id) return std::nullopt;
  const std::string path = ctx.c.path_of(*id);
  if (ctx.c.kind(*id) != ObjectKind::kDataset) {
    ctx.out.fatal("L005", path, "expected a dataset, found a group");
  }
  const DatasetInfo& info = ctx.c.dataset_info(*id);
  if (!dtype_ok(info.dtype)) {
    ctx.out.fatal("L005", path, "unexpected dtype " + std::string(dtype_name(info.dtype)));
  }
  if (rank >= 0 && info.rank() != static_cast<std::size_t>(rank)) {
    ctx.out.fatal("L005", path,
                  "expected rank " + std::to_string(rank) + ", found " + std::to_string(info.rank()));
  }
  Tensor t;
  t.shape = info.shape;
  t.data = ctx.payload ? ctx.c.read_all(*id) : make_array(info.dtype, 0);
  return t;
}

Tensor req_dataset(ReadContext& ctx, ObjectId parent, std::string_view name,
                   const std::function<bool(DType)>& dtype_ok, int rank) {
  auto t = opt_dataset(ctx, parent, name, dtype_ok, rank);
  if (!t) {
    ctx.out.fatal("L005", join_path(ctx.c.path_of(parent), name), "required dataset is missing");
  }
  return std::move(*t);
}

ObjectId open_entity(ReadContext& ctx, std::string_view path, EntityKind kind) {
  auto id = ctx.c.try_resolve(path);
  auto parts = split_path(path);
  if (!id || parts.size() != 2 || parts[0] != kDataGroup ||
      ctx.c.kind(*id) != ObjectKind::kGroup) {
    throw Error(Errc::kNoSuchEntity, "no entity at " + std::string(path), std::string(path));
  }
  auto kind_name = req_attr<std::string>(ctx, *id, "entity_kind");
  if (kind_name != entity_kind_name(kind)) {
    ctx.out.fatal("L003", std::string(path),
                  "entity_kind is '" + kind_name + "', expected '" +
                      std::string(entity_kind_name(kind)) + "'");
  }
  return *id;
}

AttrMap detail_index(std::uint64_t index) { return AttrMap{{"index", index}}; }

std::string offsets_problem(const std::vector<std::uint64_t>& offsets, std::uint64_t rows,
                            std::uint64_t total) {
  if (offsets.size() != rows + 1) {
    return "offsets length " + std::to_string(offsets.size()) + " != " + std::to_string(rows + 1);
  }
  if (offsets.front() != 0) return "offsets[0] != 0";
  for (std::size_t k = 0; k + 1 < offsets.size(); ++k) {
    if (offsets[k + 1] < offsets[k]) return "offsets decrease at " + std::to_string(k + 1);
  }
  if (offsets.back() != total) {
    return "last offset " + std::to_string(offsets.back()) + " != " + std::to_string(total) +
           " rows";
  }
  return {};
}

AttrMap strip_prefix(const AttrMap& attrs, std::string_view prefix) {
  AttrMap out;
  for (const auto& [k, v] : attrs) {
    if (k.size() > prefix.size() && std::string_view(k).starts_with(prefix)) {
      out.emplace(k.substr(prefix.size()), v);
    }
  }
  return out;
}

}  // namespace detail
}  // namespace ephyspack
