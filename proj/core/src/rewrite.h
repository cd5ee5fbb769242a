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

#ifndef EPHYSPACK_SRC_REWRITE_H_
#define EPHYSPACK_SRC_REWRITE_H_

#include <filesystem>
#include <functional>
#include <string>

#include "ephyspack/container.h"

namespace ephyspack::detail {

struct DatasetContent {
  DType dtype = DType::kF64;
  Extent shape;
  Extent chunk_shape;
  ArrayData data;
};

// Hooks see object paths; any may be empty.
struct RewriteHooks {
  // false drops the object and its subtree.
  std::function<bool(const std::string& path)> keep;
  std::function<void(const std::string& path, AttrMap& attrs)> edit_attrs;
  // A changed shape gets a fresh default chunk shape.
  std::function<void(const std::string& path, DatasetContent& content)> edit_data;
  // Runs on the output before finalize.
  std::function<void(Container& out)> finish;
};

// Object-by-object copy of a finalized file, keeping its UUID and
// created_time.
void rewrite_container(const std::filesystem::path& in, const std::filesystem::path& out,
                       const RewriteHooks& hooks);

}  // namespace ephyspack::detail

#endif  // EPHYSPACK_SRC_REWRITE_H_
