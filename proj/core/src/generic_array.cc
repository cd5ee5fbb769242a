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

#include <charconv>

#include "model_internal.h"

namespace ephyspack {

using namespace detail;

void check_generic_array(const GenericArray& ga, const ModelIndex& index, const std::string& path,
                         Reporter& out) {
  if (ga.description.empty()) out.report("A001", path, "description is empty");
  const std::size_t rank = ga.data.rank();
  if (ga.dims.size() != rank) {
    out.report("A002", path, std::to_string(ga.dims.size()) + " dimension descriptions for rank " +
                                 std::to_string(rank));
  }
  for (std::size_t d = 0; d < ga.dims.size(); ++d) {
    if (ga.dims[d].description.empty() || (ga.dims[d].unit && ga.dims[d].unit->empty())) {
      out.report("A002", path, "dimension " + std::to_string(d) + " has an empty description or unit",
                 detail_index(d));
      break;
    }
  }
  for (const auto& [d, headings] : ga.slice_headings) {
    if (d >= rank) {
      out.report("A003", path, "slice headings for dimension " + fmt(d) + " beyond rank " +
                                   std::to_string(rank));
    } else if (headings.size() != ga.data.shape[d]) {
      out.report("A003", path, std::to_string(headings.size()) + " headings for dimension " +
                                   fmt(d) + " of extent " + fmt(ga.data.shape[d]),
                 detail_index(d));
    }
  }
  if (ga.categories) {
    for (std::size_t k = 0; k < ga.categories->size(); ++k) {
      const Category& cat = (*ga.categories)[k];
      if (!finite(cat.weight) || cat.weight < 0) {
        out.report("A004", path, "category '" + cat.name + "' has weight " + fmt(cat.weight),
                   detail_index(k));
      }
    }
  }
  for (const auto& ref : ga.references) {
    if (!index.resolves(ref.path)) {
      out.report("A005", path, "reference '" + ref.path + "' does not resolve",
                 AttrMap{{"reference", ref.path}});
    } else if (ref.relation.empty()) {
      out.report("A005", path, "reference '" + ref.path + "' has no relation description");
    }
  }
}

std::string write_generic_array(Container& c, const GenericArray& ga) {
  const std::string path = entity_path(ga.name);
  Reporter out(Reporter::Mode::kWriter);
  check_generic_array(ga, build_index(c), path, out);
  return transactional(c, [&] {
    ObjectId id = group_for_new_entity(c, ga.name, entity_kind_name(EntityKind::kGenericArray));
    c.set_attribute(id, "description", ga.description);
    put_tensor(c, id, "data", ga.data);
    std::vector<std::string> desc, units;
    for (const auto& d : ga.dims) {
      desc.push_back(d.description);
      units.push_back(d.unit.value_or(""));
    }
    put_vector(c, id, "dim_descriptions", desc);
    put_vector(c, id, "dim_units", units);
    if (!ga.slice_headings.empty()) {
      ObjectId h = c.create_group(id, "headings");
      for (const auto& [d, headings] : ga.slice_headings) put_vector(c, h, std::to_string(d), headings);
    }
    if (ga.categories) {
      ObjectId cg = c.create_group(id, "categories");
      std::vector<std::string> names;
      std::vector<double> weights;
      for (const auto& cat : *ga.categories) {
        names.push_back(cat.name);
        weights.push_back(cat.weight);
      }
      put_vector(c, cg, "names", names);
      put_vector(c, cg, "weights", weights);
    }
    ObjectId rg = c.create_group(id, "references");
    std::vector<std::string> paths, relations;
    for (const auto& r : ga.references) {
      paths.push_back(r.path);
      relations.push_back(r.relation);
    }
    put_vector(c, rg, "paths", paths);
    put_vector(c, rg, "relations", relations);
    return path;
  });
}

GenericArray read_generic_array(ReadContext& ctx, std::string_view path_view) {
  const std::string path(path_view);
  ObjectId id = open_entity(ctx, path, EntityKind::kGenericArray);
  GenericArray ga;
  ga.name = split_path(path).back();
  ga.description = req_attr<std::string>(ctx, id, "description");
  ga.data = req_dataset(ctx, id, "data", [](DType) { return true; }, -1);
  Tensor desc = req_dataset(ctx, id, "dim_descriptions", [](DType d) { return d == DType::kUtf8; }, 1);
  Tensor units = req_dataset(ctx, id, "dim_units", [](DType d) { return d == DType::kUtf8; }, 1);
  if (desc.shape != units.shape) {
    ctx.out.report("A002", path, "dim_descriptions and dim_units differ in length");
  }
  if (desc.shape[0] != ga.data.rank()) {
    ctx.out.report("A002", path, fmt(desc.shape[0]) + " dimension descriptions for rank " +
                                     std::to_string(ga.data.rank()));
  }
  const auto& dv = std::get<std::vector<std::string>>(desc.data);
  const auto& uv = std::get<std::vector<std::string>>(units.data);
  for (std::size_t d = 0; d < std::min(dv.size(), uv.size()); ++d) {
    ga.dims.push_back({dv[d], uv[d].empty() ? std::nullopt : std::optional<std::string>(uv[d])});
  }
  if (auto h = child_group(ctx, id, "headings")) {
    for (const auto& entry : ctx.c.list_children(*h)) {
      std::uint64_t d = 0;
      auto [ptr, ec] = std::from_chars(entry.name.data(), entry.name.data() + entry.name.size(), d);
      if (ec != std::errc() || ptr != entry.name.data() + entry.name.size() ||
          std::to_string(d) != entry.name) {
        ctx.out.fatal("A003", path + "/headings/" + entry.name, "heading dataset name is not an index");
      }
      Tensor t = req_dataset(ctx, *h, entry.name, [](DType dt) { return dt == DType::kUtf8; }, 1);
      if (d < ga.data.rank() && t.shape[0] != ga.data.shape[d]) {
        ctx.out.report("A003", path, fmt(t.shape[0]) + " headings for dimension " + fmt(d) +
                                         " of extent " + fmt(ga.data.shape[d]));
      }
      ga.slice_headings.emplace(d, std::get<std::vector<std::string>>(std::move(t.data)));
    }
  }
  if (auto cg = child_group(ctx, id, "categories")) {
    auto names = req_vector<std::string>(ctx, *cg, "names");
    auto weights = req_vector<double>(ctx, *cg, "weights");
    if (names.size() != weights.size()) {
      ctx.out.report("A004", path, "category names and weights differ in length");
    }
    std::vector<Category> cats;
    for (std::size_t k = 0; k < std::min(names.size(), weights.size()); ++k) {
      cats.push_back({names[k], weights[k]});
    }
    ga.categories = std::move(cats);
  }
  ObjectId rg = require_child_group(ctx, id, "references");
  auto paths = req_vector<std::string>(ctx, rg, "paths");
  auto relations = req_vector<std::string>(ctx, rg, "relations");
  if (paths.size() != relations.size()) {
    ctx.out.report("A005", path, "reference paths and relations differ in length");
  }
  for (std::size_t k = 0; k < std::min(paths.size(), relations.size()); ++k) {
    ga.references.push_back({paths[k], relations[k]});
  }
  return ga;
}

GenericArray read_generic_array(const Container& c, std::string_view path) {
  Reporter out(Reporter::Mode::kReader);
  ReadContext ctx{c, out};
  return read_generic_array(ctx, path);
}

}  // namespace ephyspack
