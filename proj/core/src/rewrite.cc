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

#include "rewrite.h"

#include "model_internal.h"

namespace ephyspack::detail {
namespace {

void copy_tree(const Container& in, ObjectId from, Container& out, ObjectId to,
               const RewriteHooks& hooks) {
  for (const auto& child : in.list_children(from)) {
    const std::string path = in.path_of(child.id);
    if (hooks.keep && !hooks.keep(path)) continue;
    AttrMap attrs = in.attributes(child.id);
    if (hooks.edit_attrs) hooks.edit_attrs(path, attrs);
    ObjectId id;
    if (child.kind == ObjectKind::kGroup) {
      id = out.create_group(to, child.name);
    } else {
      const DatasetInfo& info = in.dataset_info(child.id);
      DatasetContent d{info.dtype, info.shape, info.chunk_shape, in.read_all(child.id)};
      if (hooks.edit_data) hooks.edit_data(path, d);
      if (d.shape != info.shape || d.dtype != info.dtype) d.chunk_shape = default_chunk_shape(d.dtype, d.shape);
      id = out.create_dataset(to, child.name, d.dtype, d.shape, d.chunk_shape);
      if (product(d.shape) > 0) out.write_all(id, d.data);
    }
    for (auto& [k, v] : attrs) out.set_attribute(id, k, std::move(v));
    if (child.kind == ObjectKind::kGroup) copy_tree(in, child.id, out, id, hooks);
  }
}

}  // namespace

void rewrite_container(const std::filesystem::path& in_path, const std::filesystem::path& out_path,
                       const RewriteHooks& hooks) {
  const Container in = Container::open(in_path);
  CreateOptions options{in.superblock().file_uuid, in.superblock().created_time};
  Container out = Container::create(out_path, {}, options);
  AttrMap root = in.attributes(kRootId);
  if (hooks.edit_attrs) hooks.edit_attrs("/", root);
  for (auto& [k, v] : root) out.set_attribute(kRootId, k, std::move(v));
  copy_tree(in, kRootId, out, kRootId, hooks);
  if (hooks.finish) hooks.finish(out);
  out.finalize();
}

}  // namespace ephyspack::detail
